//! Greedy averaged-perceptron part-of-speech tagger over the Penn Treebank
//! tagset, plus loading of externally produced tags.
//!
//! Weights file format (UTF-8 text, tab separated):
//!
//! ```text
//! # comment lines start with '#'
//! tagset \t <45 space-separated tag symbols>
//! <feature string> \t <tag> \t <weight>
//! ...
//! ```
//!
//! Feature strings never contain tabs. Weight rows may appear in any order.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{IronyError, Result};

/// The frozen 45-symbol tagset: nine punctuation tags, then the 36 word tags.
pub const TAGSET: [&str; 45] = [
    "#", "$", "''", "(", ")", ",", ".", ":", "``", "CC", "CD", "DT", "EX", "FW", "IN", "JJ", "JJR",
    "JJS", "LS", "MD", "NN", "NNP", "NNPS", "NNS", "PDT", "POS", "PRP", "PRP$", "RB", "RBR", "RBS",
    "RP", "SYM", "TO", "UH", "VB", "VBD", "VBG", "VBN", "VBP", "VBZ", "WDT", "WP", "WP$", "WRB",
];

pub fn tag_index(tag: &str) -> Option<usize> {
    TAGSET.iter().position(|t| *t == tag)
}

const START: [&str; 2] = ["-START-", "-START2-"];
const END: [&str; 2] = ["-END-", "-END2-"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosTaggerModel {
    /// feature → sparse (tag index, weight) list, tag indices ascending.
    weights: BTreeMap<String, Vec<(u8, f64)>>,
}

impl PosTaggerModel {
    pub fn tagset(&self) -> &'static [&'static str; 45] {
        &TAGSET
    }

    pub fn num_features(&self) -> usize {
        self.weights.len()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => IronyError::MissingResource {
                resource: "tagger weights",
                path: path.to_path_buf(),
            },
            _ => IronyError::io(path, e),
        })?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut weights: BTreeMap<String, Vec<(u8, f64)>> = BTreeMap::new();
        let mut saw_tagset = false;
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols[0] == "tagset" && cols.len() == 2 {
                let listed: Vec<&str> = cols[1].split(' ').collect();
                if listed != TAGSET {
                    return Err(IronyError::parse(
                        path,
                        lineno,
                        "tagset line does not match the 45-symbol Penn tagset",
                    ));
                }
                saw_tagset = true;
                continue;
            }
            let [feature, tag, w] = cols.as_slice() else {
                return Err(IronyError::parse(
                    path,
                    lineno,
                    "expected feature, tag, weight",
                ));
            };
            let t = tag_index(tag)
                .ok_or_else(|| IronyError::parse(path, lineno, format!("unknown tag `{tag}`")))?;
            let w: f64 = w
                .parse()
                .map_err(|_| IronyError::parse(path, lineno, format!("bad weight `{w}`")))?;
            weights
                .entry(feature.to_string())
                .or_default()
                .push((t as u8, w));
        }
        if !saw_tagset {
            return Err(IronyError::parse(path, 1, "missing tagset line"));
        }
        for list in weights.values_mut() {
            list.sort_by_key(|&(t, _)| t);
            list.dedup_by_key(|&mut (t, _)| t);
        }
        Ok(PosTaggerModel { weights })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# averaged perceptron POS tagger weights\n");
        out.push_str("tagset\t");
        out.push_str(&TAGSET.join(" "));
        out.push('\n');
        for (feature, list) in &self.weights {
            for &(t, w) in list {
                out.push_str(&format!("{feature}\t{}\t{w}\n", TAGSET[t as usize]));
            }
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| IronyError::io(path, e))
    }

    fn score(&self, features: &[String]) -> [f64; 45] {
        let mut scores = [0.0; 45];
        for f in features {
            if let Some(list) = self.weights.get(f) {
                for &(t, w) in list {
                    scores[t as usize] += w;
                }
            }
        }
        scores
    }

    /// Tags `tokens` left to right, one tag per token.
    pub fn tag(&self, tokens: &[String]) -> Vec<&'static str> {
        let context = context_words(tokens);
        let mut prev = START[0];
        let mut prev2 = START[1];
        let mut tags = Vec::with_capacity(tokens.len());
        for (i, word) in tokens.iter().enumerate() {
            let features = extract_features(i, word, &context, prev, prev2);
            let best = argmax(&self.score(&features));
            prev2 = prev;
            prev = TAGSET[best];
            tags.push(TAGSET[best]);
        }
        tags
    }

    /// Trains a tagger on gold-tagged sentences. Sentence order is shuffled
    /// every iteration with a seeded generator; weights are averaged over all
    /// updates and entries with `|w| < prune` are dropped.
    pub fn train(
        sentences: &[(Vec<String>, Vec<String>)],
        iterations: usize,
        seed: u64,
        prune: f64,
    ) -> Result<Self> {
        let mut trainer = Trainer::default();
        let mut gold = Vec::with_capacity(sentences.len());
        for (words, tags) in sentences {
            if words.len() != tags.len() {
                return Err(IronyError::Validation(
                    "sentence has different numbers of words and tags".into(),
                ));
            }
            let idx: Vec<usize> = tags
                .iter()
                .map(|t| {
                    tag_index(t).ok_or_else(|| IronyError::Validation(format!("unknown tag `{t}`")))
                })
                .collect::<Result<_>>()?;
            gold.push((words, idx));
        }
        let mut order: Vec<usize> = (0..gold.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..iterations {
            for &s in &order {
                let (words, tags) = &gold[s];
                let context = context_words(words);
                let mut prev = START[0];
                let mut prev2 = START[1];
                for (i, word) in words.iter().enumerate() {
                    let features = extract_features(i, word, &context, prev, prev2);
                    trainer.update(&features, tags[i]);
                    prev2 = prev;
                    prev = TAGSET[tags[i]];
                }
            }
            order.shuffle(&mut rng);
        }
        Ok(trainer.finish(prune))
    }
}

fn argmax(scores: &[f64; 45]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

#[derive(Default)]
struct Trainer {
    // feature → tag → (weight, accumulated total, last update step)
    weights: HashMap<String, HashMap<usize, (f64, f64, u64)>>,
    step: u64,
}

impl Trainer {
    fn update(&mut self, features: &[String], truth: usize) -> usize {
        let mut scores = [0.0; 45];
        for f in features {
            if let Some(m) = self.weights.get(f) {
                for (&t, &(w, _, _)) in m {
                    scores[t] += w;
                }
            }
        }
        let guess = argmax(&scores);
        self.step += 1;
        if guess != truth {
            for f in features {
                let m = self.weights.entry(f.clone()).or_default();
                for (t, delta) in [(truth, 1.0), (guess, -1.0)] {
                    let e = m.entry(t).or_insert((0.0, 0.0, self.step));
                    e.1 += (self.step - e.2) as f64 * e.0;
                    e.2 = self.step;
                    e.0 += delta;
                }
            }
        }
        guess
    }

    fn finish(self, prune: f64) -> PosTaggerModel {
        let mut weights = BTreeMap::new();
        let steps = self.step.max(1) as f64;
        for (f, m) in self.weights {
            let mut list: Vec<(u8, f64)> = m
                .into_iter()
                .map(|(t, (w, total, last))| {
                    let total = total + (self.step - last) as f64 * w;
                    let avg = (total / steps * 1e4).round() / 1e4;
                    (t as u8, avg)
                })
                .filter(|&(_, w)| w.abs() >= prune && w != 0.0)
                .collect();
            if !list.is_empty() {
                list.sort_by_key(|&(t, _)| t);
                weights.insert(f, list);
            }
        }
        PosTaggerModel { weights }
    }
}

fn normalize_word(word: &str) -> String {
    let first = word.chars().next();
    if word.contains('-') && first != Some('-') {
        "!HYPHEN".into()
    } else if word.len() == 4 && word.chars().all(|c| c.is_ascii_digit()) {
        "!YEAR".into()
    } else if first.is_some_and(|c| c.is_ascii_digit()) {
        "!DIGITS".into()
    } else {
        word.to_lowercase()
    }
}

fn context_words(tokens: &[String]) -> Vec<String> {
    let mut ctx = Vec::with_capacity(tokens.len() + 4);
    ctx.extend(START.iter().map(|s| s.to_string()));
    ctx.extend(tokens.iter().map(|t| normalize_word(t)));
    ctx.extend(END.iter().map(|s| s.to_string()));
    ctx
}

/// Coarse character-class shape, runs capped at two (`Hello` → `Xxx`).
fn word_shape(word: &str) -> String {
    let mut shape = String::new();
    let mut last = None;
    let mut run = 0;
    for c in word.chars() {
        let class = if c.is_uppercase() {
            'X'
        } else if c.is_lowercase() {
            'x'
        } else if c.is_ascii_digit() {
            'd'
        } else {
            c
        };
        if Some(class) == last {
            run += 1;
        } else {
            last = Some(class);
            run = 1;
        }
        if run <= 2 {
            shape.push(class);
        }
    }
    shape
}

fn prefix(s: &str, n: usize) -> &str {
    match s.char_indices().nth(n) {
        Some((i, _)) => &s[..i],
        None => s,
    }
}

fn suffix(s: &str, n: usize) -> &str {
    let count = s.chars().count();
    if count <= n {
        return s;
    }
    let (i, _) = s.char_indices().nth(count - n).unwrap();
    &s[i..]
}

fn extract_features(
    i: usize,
    word: &str,
    context: &[String],
    prev: &str,
    prev2: &str,
) -> Vec<String> {
    let w = &context[i + 2];
    let mut f = Vec::with_capacity(20);
    f.push("bias".to_string());
    for n in 1..=3 {
        f.push(format!("i pre{n} {}", prefix(w, n)));
        f.push(format!("i suf{n} {}", suffix(w, n)));
    }
    f.push(format!("i shape {}", word_shape(word)));
    f.push(format!("i-1 tag {prev}"));
    f.push(format!("i-2 tag {prev2}"));
    f.push(format!("i tag+i-2 tag {prev} {prev2}"));
    f.push(format!("i word {w}"));
    f.push(format!("i-1 tag+i word {prev} {w}"));
    f.push(format!("i-1 word {}", context[i + 1]));
    f.push(format!("i-1 suffix {}", suffix(&context[i + 1], 3)));
    f.push(format!("i-2 word {}", context[i]));
    f.push(format!("i+1 word {}", context[i + 3]));
    f.push(format!("i+1 suffix {}", suffix(&context[i + 3], 3)));
    f.push(format!("i+2 word {}", context[i + 4]));
    f
}

/// Tags `tokens` with `tagger`.
pub fn pos_tag(tokens: &[String], tagger: &PosTaggerModel) -> Vec<String> {
    tagger.tag(tokens).into_iter().map(str::to_string).collect()
}

/// Reads a sidecar TSV of `id \t space-separated tags`, validating every tag
/// against the tagset.
pub fn read_sidecar_tags(path: impl AsRef<Path>) -> Result<BTreeMap<u64, Vec<String>>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| IronyError::io(path, e))?;
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let (id, tags) = line.split_once('\t').unwrap_or((line, ""));
        let id: u64 = id
            .trim()
            .parse()
            .map_err(|_| IronyError::parse(path, i + 1, format!("bad tweet id `{id}`")))?;
        let tags: Vec<String> = tags.split_whitespace().map(str::to_string).collect();
        if let Some(bad) = tags.iter().find(|t| tag_index(t).is_none()) {
            return Err(IronyError::Validation(format!(
                "{}:{}: unknown POS tag `{bad}`",
                path.display(),
                i + 1
            )));
        }
        out.insert(id, tags);
    }
    Ok(out)
}

/// Strict-mode coverage check: every id in `ids` must have sidecar tags.
pub fn check_sidecar_coverage(
    sidecar: &BTreeMap<u64, Vec<String>>,
    ids: impl IntoIterator<Item = u64>,
) -> Result<()> {
    let missing: BTreeSet<u64> = ids
        .into_iter()
        .filter(|id| !sidecar.contains_key(id))
        .collect();
    if missing.is_empty() {
        return Ok(());
    }
    let list: Vec<String> = missing.iter().map(u64::to_string).collect();
    Err(IronyError::Validation(format!(
        "POS sidecar is missing tweet ids: {}",
        list.join(", ")
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resources::{default_resource_dir, layout};
    use std::io::Write;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    fn shipped() -> PosTaggerModel {
        PosTaggerModel::load(default_resource_dir().join(layout::TAGGER)).unwrap()
    }

    #[test]
    fn tagset_has_45_distinct_symbols() {
        let set: BTreeSet<_> = TAGSET.iter().collect();
        assert_eq!(set.len(), 45);
    }

    #[test]
    fn shipped_tagger_basic_sentence() {
        let t = shipped();
        let tags = pos_tag(&s(&["the", "cat"]), &t);
        assert_eq!(tags[0], "DT");
        assert!(tags.iter().all(|g| tag_index(g).is_some()));
        assert_eq!(tags, pos_tag(&s(&["the", "cat"]), &t));
        assert!(pos_tag(&[], &t).is_empty());
        let user = pos_tag(&s(&["<USER>"]), &t);
        assert_eq!(user.len(), 1);
        assert!(tag_index(&user[0]).is_some());
        assert_eq!(user, pos_tag(&s(&["<USER>"]), &t));
    }

    #[test]
    fn shipped_tagger_is_reasonable() {
        let t = shipped();
        let tags = pos_tag(&s(&["i", "love", "this", "movie", "."]), &t);
        assert_eq!(tags, ["PRP", "VBP", "DT", "NN", "."]);
    }

    #[test]
    fn train_tiny_corpus_and_roundtrip_text() {
        let data = vec![
            (s(&["the", "dog", "runs"]), s(&["DT", "NN", "VBZ"])),
            (s(&["a", "cat", "sleeps"]), s(&["DT", "NN", "VBZ"])),
            (s(&["dogs", "run"]), s(&["NNS", "VBP"])),
        ];
        let m = PosTaggerModel::train(&data, 8, 7, 0.0).unwrap();
        assert_eq!(
            pos_tag(&s(&["the", "cat", "runs"]), &m),
            ["DT", "NN", "VBZ"]
        );
        let again = PosTaggerModel::parse(&m.to_text(), Path::new("mem")).unwrap();
        assert_eq!(again, m);
        assert_eq!(
            PosTaggerModel::train(&data, 8, 7, 0.0).unwrap(),
            m,
            "training is deterministic"
        );
    }

    #[test]
    fn unknown_tag_in_weights_rejected() {
        let text = format!("tagset\t{}\nbias\tXX9\t1.0\n", TAGSET.join(" "));
        assert!(PosTaggerModel::parse(&text, Path::new("w")).is_err());
    }

    #[test]
    fn missing_weights_file() {
        let e = PosTaggerModel::load("/nonexistent/tagger.tsv").unwrap_err();
        assert!(matches!(e, IronyError::MissingResource { .. }));
    }

    #[test]
    fn sidecar_rows() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "7\tDT NN").unwrap();
        writeln!(f, "9\t").unwrap();
        let m = read_sidecar_tags(f.path()).unwrap();
        assert_eq!(m[&7], s(&["DT", "NN"]));
        assert!(m[&9].is_empty());

        let mut bad = tempfile::NamedTempFile::new().unwrap();
        writeln!(bad, "1\tDT XX9").unwrap();
        let e = read_sidecar_tags(bad.path()).unwrap_err();
        assert!(e.to_string().contains("XX9"));
    }

    #[test]
    fn sidecar_strict_coverage_lists_missing() {
        let sidecar = BTreeMap::from([(1, s(&["DT"])), (2, s(&["NN"]))]);
        assert!(check_sidecar_coverage(&sidecar, [1, 2]).is_ok());
        let e = check_sidecar_coverage(&sidecar, [1, 2, 3, 4]).unwrap_err();
        assert!(e.to_string().contains("3, 4"));
    }

    #[test]
    fn shapes_and_affixes() {
        assert_eq!(word_shape("Hello"), "Xxx");
        assert_eq!(word_shape("<USER>"), "<XX>");
        assert_eq!(suffix("héllo", 3), "llo");
        assert_eq!(prefix("héllo", 2), "hé");
        assert_eq!(suffix("ab", 3), "ab");
    }
}
