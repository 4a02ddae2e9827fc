//! SemEval-style tweet datasets: `index \t label \t text`, one tweet per line,
//! with an optional `Tweet index ...` header.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{IronyError, Result};

/// Which of the two irony subtasks a corpus or model belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Task {
    /// Binary: 0 = non-ironic, 1 = ironic.
    A,
    /// Four-way: 0 = non-irony, 1 = polarity-contrast verbal irony,
    /// 2 = other verbal irony, 3 = situational irony.
    B,
}

impl Task {
    pub fn num_classes(self) -> usize {
        match self {
            Task::A => 2,
            Task::B => 4,
        }
    }

    pub fn is_valid_label(self, label: u32) -> bool {
        (label as usize) < self.num_classes()
    }

    pub fn class_names(self) -> &'static [&'static str] {
        match self {
            Task::A => &["non-ironic", "ironic"],
            Task::B => &[
                "non-irony",
                "polarity-contrast",
                "other-verbal",
                "situational",
            ],
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Task::A => f.write_str("A"),
            Task::B => f.write_str("B"),
        }
    }
}

impl FromStr for Task {
    type Err = IronyError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" | "1" => Ok(Task::A),
            "B" | "2" => Ok(Task::B),
            other => Err(IronyError::Config(format!(
                "unknown task `{other}` (expected A or B)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawTweet {
    pub id: u64,
    pub text: String,
    pub label: Option<u32>,
}

impl RawTweet {
    pub fn new(id: u64, text: impl Into<String>, label: Option<u32>) -> Self {
        RawTweet {
            id,
            text: text.into(),
            label,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledCorpus {
    pub tweets: Vec<RawTweet>,
    pub task: Task,
    pub provenance: String,
}

impl LabeledCorpus {
    /// Builds a corpus from in-memory tweets, enforcing the same invariants as
    /// [`load_dataset`].
    pub fn new(tweets: Vec<RawTweet>, task: Task, provenance: impl Into<String>) -> Result<Self> {
        if tweets.is_empty() {
            return Err(IronyError::Validation("no data rows".into()));
        }
        let mut seen = HashSet::with_capacity(tweets.len());
        for t in &tweets {
            if !seen.insert(t.id) {
                return Err(IronyError::Validation(format!(
                    "duplicate tweet id {}",
                    t.id
                )));
            }
            match t.label {
                Some(l) if task.is_valid_label(l) => {}
                Some(l) => {
                    return Err(IronyError::Validation(format!(
                        "tweet {}: label {l} out of range for task {task}",
                        t.id
                    )))
                }
                None => {
                    return Err(IronyError::Validation(format!(
                        "tweet {} has no label",
                        t.id
                    )))
                }
            }
        }
        Ok(LabeledCorpus {
            tweets,
            task,
            provenance: provenance.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.tweets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tweets.is_empty()
    }

    pub fn labels(&self) -> Vec<u32> {
        self.tweets.iter().map(|t| t.label.unwrap_or(0)).collect()
    }

    pub fn class_counts(&self) -> BTreeMap<u32, usize> {
        let mut counts = BTreeMap::new();
        for l in self.labels() {
            *counts.entry(l).or_insert(0) += 1;
        }
        counts
    }

    /// Sub-corpus with the tweets at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> LabeledCorpus {
        LabeledCorpus {
            tweets: indices.iter().map(|&i| self.tweets[i].clone()).collect(),
            task: self.task,
            provenance: self.provenance.clone(),
        }
    }
}

fn is_header(line: &str) -> bool {
    line.trim_start()
        .to_ascii_lowercase()
        .starts_with("tweet index")
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| IronyError::io(path, e))
}

/// Loads a labeled dataset for `task`.
pub fn load_dataset(path: impl AsRef<Path>, task: Task) -> Result<LabeledCorpus> {
    let path = path.as_ref();
    let text = read_text(path)?;
    parse_dataset(&text, path, task)
}

pub fn parse_dataset(text: &str, path: &Path, task: Task) -> Result<LabeledCorpus> {
    let mut tweets = Vec::new();
    let mut seen = HashSet::new();
    for (lineno, line) in data_lines(text) {
        let cols: Vec<&str> = line.splitn(3, '\t').collect();
        if cols.len() != 3 {
            return Err(IronyError::parse(
                path,
                lineno,
                format!("expected 3 tab-separated columns, found {}", cols.len()),
            ));
        }
        let id = parse_id(cols[0], path, lineno)?;
        let label: u32 = cols[1]
            .trim()
            .parse()
            .map_err(|_| IronyError::parse(path, lineno, format!("bad label `{}`", cols[1])))?;
        if !task.is_valid_label(label) {
            return Err(IronyError::Validation(format!(
                "{}:{lineno}: label {label} out of range for task {task}",
                path.display()
            )));
        }
        if !seen.insert(id) {
            return Err(IronyError::Validation(format!(
                "{}:{lineno}: duplicate tweet id {id}",
                path.display()
            )));
        }
        tweets.push(RawTweet::new(id, cols[2], Some(label)));
    }
    if tweets.is_empty() {
        return Err(IronyError::Validation(format!(
            "{}: no data rows",
            path.display()
        )));
    }
    Ok(LabeledCorpus {
        tweets,
        task,
        provenance: path.display().to_string(),
    })
}

/// Loads tweets for prediction. Rows may be `index \t text` or
/// `index \t label \t text`; labels are kept when present.
pub fn load_unlabeled(path: impl AsRef<Path>) -> Result<Vec<RawTweet>> {
    let path = path.as_ref();
    let text = read_text(path)?;
    let mut tweets = Vec::new();
    let mut seen = HashSet::new();
    for (lineno, line) in data_lines(&text) {
        let cols: Vec<&str> = line.splitn(3, '\t').collect();
        let tweet = match cols.as_slice() {
            [id, label, text] if label.trim().parse::<u32>().is_ok() => RawTweet::new(
                parse_id(id, path, lineno)?,
                *text,
                label.trim().parse().ok(),
            ),
            [id, rest @ ..] if !rest.is_empty() => {
                RawTweet::new(parse_id(id, path, lineno)?, rest.join("\t"), None)
            }
            _ => {
                return Err(IronyError::parse(
                    path,
                    lineno,
                    "expected `index \\t text` or `index \\t label \\t text`",
                ))
            }
        };
        if !seen.insert(tweet.id) {
            return Err(IronyError::Validation(format!(
                "{}:{lineno}: duplicate tweet id {}",
                path.display(),
                tweet.id
            )));
        }
        tweets.push(tweet);
    }
    if tweets.is_empty() {
        return Err(IronyError::Validation(format!(
            "{}: no data rows",
            path.display()
        )));
    }
    Ok(tweets)
}

/// Writes tweets in dataset layout; unlabeled tweets get two columns.
pub fn write_dataset(path: impl AsRef<Path>, tweets: &[RawTweet]) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::from("Tweet index\tLabel\tTweet text\n");
    for t in tweets {
        match t.label {
            Some(l) => out.push_str(&format!("{}\t{}\t{}\n", t.id, l, t.text)),
            None => out.push_str(&format!("{}\t{}\n", t.id, t.text)),
        }
    }
    fs::write(path, out).map_err(|e| IronyError::io(path, e))
}

fn parse_id(s: &str, path: &Path, lineno: usize) -> Result<u64> {
    s.trim()
        .parse()
        .map_err(|_| IronyError::parse(path, lineno, format!("bad tweet index `{s}`")))
}

/// Non-blank lines with 1-based line numbers, header skipped.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(i, l)| !l.trim().is_empty() && !(*i == 1 && is_header(l)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, task: Task) -> Result<LabeledCorpus> {
        parse_dataset(text, Path::new("mem.tsv"), task)
    }

    #[test]
    fn three_rows_with_header() {
        let c = parse(
            "Tweet index\tLabel\tTweet text\n1\t0\thello\n2\t1\tso great\n3\t0\tbye\n",
            Task::A,
        )
        .unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.class_counts(), BTreeMap::from([(0, 2), (1, 1)]));
        assert_eq!(c.tweets[1].text, "so great");
    }

    #[test]
    fn empty_file_has_no_data_rows() {
        let e = parse("", Task::A).unwrap_err();
        assert!(e.to_string().contains("no data rows"));
        let e = parse("Tweet index\tLabel\tTweet text\n", Task::A).unwrap_err();
        assert!(e.to_string().contains("no data rows"));
    }

    #[test]
    fn malformed_row_names_line() {
        let e = parse("1\t0\tok\n2\tmissing\n", Task::A).unwrap_err();
        match e {
            IronyError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn label_out_of_range_is_validation_error() {
        assert!(matches!(
            parse("1\t2\tx\n", Task::A).unwrap_err(),
            IronyError::Validation(_)
        ));
        assert!(parse("1\t3\tx\n", Task::B).is_ok());
        assert!(parse("1\t4\tx\n", Task::B).is_err());
    }

    #[test]
    fn duplicate_ids_rejected() {
        assert!(parse("1\t0\tx\n1\t1\ty\n", Task::A).is_err());
    }

    #[test]
    fn text_may_contain_tabs() {
        let c = parse("7\t1\ta\tb\n", Task::A).unwrap();
        assert_eq!(c.tweets[0].text, "a\tb");
    }

    #[test]
    fn task_parsing() {
        assert_eq!("a".parse::<Task>().unwrap(), Task::A);
        assert_eq!("B".parse::<Task>().unwrap(), Task::B);
        assert!("C".parse::<Task>().is_err());
    }
}
