//! Lexical and syntactic tf-idf blocks: pooled 1–3-gram vocabularies at word
//! and character level, surface counts, and per-tag POS weights.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{IronyError, Result};
use crate::tagger::{tag_index, TAGSET};
use crate::tokenize::TokenizedTweet;

/// Sorted `(column, value)` pairs.
pub type SparseBlock = Vec<(u32, f64)>;

pub const MAX_N: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NgramLevel {
    Word,
    Char,
}

impl NgramLevel {
    pub fn name(self) -> &'static str {
        match self {
            NgramLevel::Word => "word",
            NgramLevel::Char => "char",
        }
    }
}

/// Smoothed inverse document frequency.
pub fn idf(n_docs: usize, df: usize) -> f64 {
    ((1.0 + n_docs as f64) / (1.0 + df as f64)).ln() + 1.0
}

/// All 1..=3-grams of a tweet at `level`, with multiplicity. Word grams are
/// tokens joined by a space; char grams come from the normalized text.
pub fn extract_grams(tweet: &TokenizedTweet, level: NgramLevel) -> Vec<String> {
    match level {
        NgramLevel::Word => {
            let toks: Vec<&str> = tweet.tokens.iter().map(String::as_str).collect();
            let mut out = Vec::new();
            for n in 1..=MAX_N {
                for w in toks.windows(n) {
                    out.push(w.join(" "));
                }
            }
            out
        }
        NgramLevel::Char => {
            let chars: Vec<char> = tweet.text.chars().collect();
            let mut out = Vec::new();
            for n in 1..=MAX_N {
                for w in chars.windows(n) {
                    out.push(w.iter().collect());
                }
            }
            out
        }
    }
}

fn count_grams(tweet: &TokenizedTweet, level: NgramLevel) -> HashMap<String, u32> {
    let mut counts = HashMap::new();
    for g in extract_grams(tweet, level) {
        *counts.entry(g).or_insert(0) += 1;
    }
    counts
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NgramEntry {
    pub gram: String,
    pub idf: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NgramVocabulary {
    pub level: NgramLevel,
    pub top_k: usize,
    /// Column `i` is `entries[i]`.
    pub entries: Vec<NgramEntry>,
    index: BTreeMap<String, u32>,
}

impl NgramVocabulary {
    /// Keeps the `top_k` grams with the largest tf-idf summed over the
    /// corpus; ties go to the lexicographically smaller gram.
    pub fn fit(corpus: &[TokenizedTweet], level: NgramLevel, top_k: usize) -> Result<Self> {
        if top_k == 0 {
            return Err(IronyError::Config("n-gram top_k must be positive".into()));
        }
        if corpus.is_empty() {
            return Err(IronyError::Validation(
                "cannot fit an n-gram vocabulary on an empty corpus".into(),
            ));
        }
        let mut df: HashMap<String, usize> = HashMap::new();
        let mut total: HashMap<String, u64> = HashMap::new();
        for tweet in corpus {
            for (g, c) in count_grams(tweet, level) {
                *total.entry(g.clone()).or_insert(0) += u64::from(c);
                *df.entry(g).or_insert(0) += 1;
            }
        }
        let n = corpus.len();
        let mut scored: Vec<(f64, f64, String)> = total
            .into_iter()
            .map(|(g, t)| {
                let w = idf(n, df[&g]);
                (t as f64 * w, w, g)
            })
            .collect();
        scored.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.2.cmp(&b.2)));
        scored.truncate(top_k);
        let entries: Vec<NgramEntry> = scored
            .into_iter()
            .map(|(_, idf, gram)| NgramEntry { gram, idf })
            .collect();
        Ok(Self::from_entries(level, top_k, entries))
    }

    pub fn from_entries(level: NgramLevel, top_k: usize, entries: Vec<NgramEntry>) -> Self {
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, e)| (e.gram.clone(), i as u32))
            .collect();
        NgramVocabulary {
            level,
            top_k,
            entries,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn column(&self, gram: &str) -> Option<usize> {
        self.index.get(gram).map(|&c| c as usize)
    }

    /// L2-normalized tf-idf block; out-of-vocabulary grams are ignored.
    pub fn vectorize(&self, tweet: &TokenizedTweet) -> SparseBlock {
        let mut block: SparseBlock = count_grams(tweet, self.level)
            .into_iter()
            .filter_map(|(g, tf)| {
                let col = *self.index.get(&g)?;
                Some((col, f64::from(tf) * self.entries[col as usize].idf))
            })
            .collect();
        block.sort_by_key(|&(c, _)| c);
        l2_normalize(&mut block);
        block
    }
}

pub fn l2_normalize(block: &mut SparseBlock) {
    let norm = block.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        for (_, v) in block.iter_mut() {
            *v /= norm;
        }
    }
}

/// `[character count, token count]`.
pub fn surface_counts(tweet: &TokenizedTweet) -> [f64; 2] {
    [tweet.char_count() as f64, tweet.word_count() as f64]
}

/// Per-tag idf over the frozen tagset; unseen tags get the df = 0 weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosVocabulary {
    pub idf: Vec<f64>,
}

impl PosVocabulary {
    pub fn fit(corpus: &[TokenizedTweet]) -> Self {
        let mut df = vec![0usize; TAGSET.len()];
        for tweet in corpus {
            let mut seen = [false; TAGSET.len()];
            for t in tweet.tags.iter().filter_map(|t| tag_index(t)) {
                seen[t] = true;
            }
            for (d, s) in df.iter_mut().zip(seen) {
                *d += usize::from(s);
            }
        }
        PosVocabulary {
            idf: df.into_iter().map(|d| idf(corpus.len(), d)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.idf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.idf.is_empty()
    }

    pub fn vectorize(&self, tweet: &TokenizedTweet) -> SparseBlock {
        let mut tf = [0u32; TAGSET.len()];
        for t in tweet.tags.iter().filter_map(|t| tag_index(t)) {
            tf[t] += 1;
        }
        let mut block: SparseBlock = tf
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (i as u32, f64::from(c) * self.idf[i]))
            .collect();
        l2_normalize(&mut block);
        block
    }
}
