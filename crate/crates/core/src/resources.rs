//! External resource files: word embeddings, sentiment lexicons, the
//! normalization dictionary and the emoji tables.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{IronyError, Result};

pub const DEFAULT_EMBEDDING_DIM: usize = 300;

/// Fixed negation cue list.
pub const NEGATION_WORDS: [&str; 10] = [
    "not", "n't", "no", "never", "neither", "nor", "nobody", "nothing", "nowhere", "cannot",
];

/// Default location of the shipped resource files. `IRONY_RESOURCES`
/// overrides the compiled-in crate data directory.
pub fn default_resource_dir() -> PathBuf {
    std::env::var_os("IRONY_RESOURCES")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("data"))
}

/// Word → fixed-width real vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingTable {
    dim: usize,
    index: BTreeMap<String, u32>,
    vectors: Vec<f64>,
}

impl EmbeddingTable {
    pub fn empty(dim: usize) -> Self {
        EmbeddingTable {
            dim,
            index: BTreeMap::new(),
            vectors: Vec::new(),
        }
    }

    /// Builds a table from `(word, vector)` pairs; the first occurrence of a
    /// word wins.
    pub fn from_pairs<I, S>(dim: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: Into<String>,
    {
        let mut table = EmbeddingTable::empty(dim);
        for (word, v) in pairs {
            if v.len() != dim {
                return Err(IronyError::Validation(format!(
                    "embedding has {} values, expected {dim}",
                    v.len()
                )));
            }
            table.insert(word.into(), &v);
        }
        Ok(table)
    }

    fn insert(&mut self, word: String, v: &[f64]) {
        if self.index.contains_key(&word) {
            return;
        }
        let row = (self.vectors.len() / self.dim.max(1)) as u32;
        self.index.insert(word, row);
        self.vectors.extend_from_slice(v);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.index.get(word).map(|&row| {
            let start = row as usize * self.dim;
            &self.vectors[start..start + self.dim]
        })
    }
}

/// Reads a GloVe-style text file: a token followed by `expected_dim` reals per
/// line. A leading word2vec `count dim` header line is tolerated.
pub fn load_embedding_table(path: impl AsRef<Path>, expected_dim: usize) -> Result<EmbeddingTable> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => IronyError::MissingResource {
            resource: "embeddings",
            path: path.to_path_buf(),
        },
        _ => IronyError::io(path, e),
    })?;
    let mut table = EmbeddingTable::empty(expected_dim);
    let mut values = Vec::with_capacity(expected_dim);
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let mut fields = line.split_whitespace();
        let Some(token) = fields.next() else { continue };
        values.clear();
        for f in fields {
            let v: f64 = f
                .parse()
                .map_err(|_| IronyError::parse(path, lineno, format!("unparsable real `{f}`")))?;
            values.push(v);
        }
        if lineno == 1 && values.len() == 1 && token.parse::<u64>().is_ok() {
            continue;
        }
        if values.len() != expected_dim {
            return Err(IronyError::parse(
                path,
                lineno,
                format!(
                    "dimension mismatch: {} values, expected {expected_dim}",
                    values.len()
                ),
            ));
        }
        table.insert(token.to_string(), &values);
    }
    Ok(table)
}

fn read_resource(path: &Path, resource: &'static str) -> Result<String> {
    fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => IronyError::MissingResource {
            resource,
            path: path.to_path_buf(),
        },
        _ => IronyError::io(path, e),
    })
}

fn parse_word_list(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with(';'))
        .map(str::to_lowercase)
        .collect()
}

/// One word per line; `;` comment lines skipped; entries case-folded.
pub fn load_lexicon(path: impl AsRef<Path>) -> Result<BTreeSet<String>> {
    let path = path.as_ref();
    Ok(parse_word_list(&read_resource(path, "lexicon")?))
}

fn parse_two_columns<'a>(
    text: &'a str,
    path: &'a Path,
) -> impl Iterator<Item = Result<(usize, &'a str, &'a str)>> + 'a {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with(';') && !l.starts_with('#'))
        .map(move |(i, l)| {
            let l = l.trim_end_matches('\r');
            match l.split_once('\t') {
                Some((a, b)) if !a.trim().is_empty() && !b.trim().is_empty() => {
                    Ok((i + 1, a.trim(), b.trim()))
                }
                _ => Err(IronyError::parse(
                    path,
                    i + 1,
                    "expected two tab-separated columns",
                )),
            }
        })
}

/// Variant → canonical form. Both sides are case-folded.
pub fn load_normalization_dict(path: impl AsRef<Path>) -> Result<BTreeMap<String, String>> {
    let path = path.as_ref();
    let text = read_resource(path, "normalization dictionary")?;
    let mut map = BTreeMap::new();
    for row in parse_two_columns(&text, path) {
        let (_, variant, canonical) = row?;
        map.entry(variant.to_lowercase())
            .or_insert_with(|| canonical.to_lowercase());
    }
    Ok(map)
}

/// Emoji character sequence → descriptive name. The key column is either
/// space-separated `U+XXXX` code points or the literal characters.
pub fn load_emoji_map(path: impl AsRef<Path>) -> Result<BTreeMap<String, String>> {
    let path = path.as_ref();
    let text = read_resource(path, "emoji map")?;
    let mut map = BTreeMap::new();
    for row in parse_two_columns(&text, path) {
        let (lineno, key, name) = row?;
        let seq = if key.starts_with("U+") || key.starts_with("u+") {
            parse_codepoints(key).ok_or_else(|| {
                IronyError::parse(path, lineno, format!("bad code point sequence `{key}`"))
            })?
        } else {
            key.to_string()
        };
        map.entry(seq).or_insert_with(|| name.to_string());
    }
    Ok(map)
}

fn parse_codepoints(key: &str) -> Option<String> {
    key.split_whitespace()
        .map(|cp| {
            let hex = cp.strip_prefix("U+").or_else(|| cp.strip_prefix("u+"))?;
            char::from_u32(u32::from_str_radix(hex, 16).ok()?)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarity {
    Positive,
    Negative,
}

/// Emoji name → polarity (`pos` / `neg`).
pub fn load_emoji_polarity(path: impl AsRef<Path>) -> Result<BTreeMap<String, Polarity>> {
    let path = path.as_ref();
    let text = read_resource(path, "emoji polarity table")?;
    let mut map = BTreeMap::new();
    for row in parse_two_columns(&text, path) {
        let (lineno, name, pol) = row?;
        let pol = match pol.to_ascii_lowercase().as_str() {
            "pos" | "positive" | "+" => Polarity::Positive,
            "neg" | "negative" | "-" => Polarity::Negative,
            other => {
                return Err(IronyError::parse(
                    path,
                    lineno,
                    format!("polarity must be pos or neg, got `{other}`"),
                ))
            }
        };
        map.entry(name.to_lowercase()).or_insert(pol);
    }
    Ok(map)
}

/// Everything the normalizer and the polarity block read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceBundle {
    pub embeddings: EmbeddingTable,
    pub positive_lexicon: BTreeSet<String>,
    pub negative_lexicon: BTreeSet<String>,
    pub normalization_dict: BTreeMap<String, String>,
    pub emoji_map: BTreeMap<String, String>,
    pub emoji_polarity: BTreeMap<String, Polarity>,
    pub negation_words: BTreeSet<String>,
    /// Vocabulary consulted when squeezing elongated words.
    pub known_words: BTreeSet<String>,
}

impl Default for ResourceBundle {
    fn default() -> Self {
        ResourceBundle {
            embeddings: EmbeddingTable::empty(DEFAULT_EMBEDDING_DIM),
            positive_lexicon: BTreeSet::new(),
            negative_lexicon: BTreeSet::new(),
            normalization_dict: BTreeMap::new(),
            emoji_map: BTreeMap::new(),
            emoji_polarity: BTreeMap::new(),
            negation_words: NEGATION_WORDS.iter().map(|s| s.to_string()).collect(),
            known_words: BTreeSet::new(),
        }
    }
}

/// File names inside a resource directory.
pub mod layout {
    pub const POSITIVE: &str = "lexicon/positive-words.txt";
    pub const NEGATIVE: &str = "lexicon/negative-words.txt";
    pub const NORM_DICT: &str = "normalization/norm-dict.tsv";
    pub const KNOWN_WORDS: &str = "normalization/known-words.txt";
    pub const EMOJI_MAP: &str = "emoji/emoji-map.tsv";
    pub const EMOJI_POLARITY: &str = "emoji/emoji-polarity.tsv";
    pub const TAGGER: &str = "tagger/perceptron.tsv";
}

impl ResourceBundle {
    /// Loads every resource from `dir` (see [`layout`]). Embeddings are read
    /// from `embeddings` when given, otherwise the table is empty.
    pub fn load_dir(dir: impl AsRef<Path>, embeddings: Option<&Path>, dim: usize) -> Result<Self> {
        let dir = dir.as_ref();
        let embeddings = match embeddings {
            Some(p) => load_embedding_table(p, dim)?,
            None => EmbeddingTable::empty(dim),
        };
        Ok(ResourceBundle {
            embeddings,
            positive_lexicon: load_lexicon(dir.join(layout::POSITIVE))?,
            negative_lexicon: load_lexicon(dir.join(layout::NEGATIVE))?,
            normalization_dict: load_normalization_dict(dir.join(layout::NORM_DICT))?,
            emoji_map: load_emoji_map(dir.join(layout::EMOJI_MAP))?,
            emoji_polarity: load_emoji_polarity(dir.join(layout::EMOJI_POLARITY))?,
            negation_words: NEGATION_WORDS.iter().map(|s| s.to_string()).collect(),
            known_words: parse_word_list(&read_resource(
                &dir.join(layout::KNOWN_WORDS),
                "known-word list",
            )?),
        })
    }
}
