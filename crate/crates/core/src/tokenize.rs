//! Tweet-aware tokenization of normalized text.

use serde::{Deserialize, Serialize};

use crate::normalize::{URL_SENTINEL, USER_SENTINEL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenizedTweet {
    pub id: u64,
    /// The normalized text the tokens were cut from.
    pub text: String,
    pub tokens: Vec<String>,
    pub tags: Vec<String>,
}

impl TokenizedTweet {
    pub fn char_count(&self) -> usize {
        self.text.chars().count()
    }

    pub fn word_count(&self) -> usize {
        self.tokens.len()
    }
}

const CLITICS: [&str; 6] = ["'s", "'m", "'d", "'re", "'ve", "'ll"];

fn is_punct(c: char) -> bool {
    !c.is_alphanumeric() && c != '_'
}

/// Splits on whitespace, peels leading and trailing punctuation into
/// one-character tokens, and splits contractions (`don't` → `do n't`,
/// `it's` → `it 's`). Sentinels and `#hashtags` stay whole.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        split_sentinels(chunk, &mut out);
    }
    out
}

fn split_sentinels(chunk: &str, out: &mut Vec<String>) {
    let mut rest = chunk;
    loop {
        let next = [USER_SENTINEL, URL_SENTINEL]
            .iter()
            .filter_map(|s| rest.find(s).map(|i| (i, *s)))
            .min();
        match next {
            Some((i, s)) => {
                split_chunk(&rest[..i], out);
                out.push(s.to_string());
                rest = &rest[i + s.len()..];
            }
            None => {
                split_chunk(rest, out);
                return;
            }
        }
    }
}

fn split_chunk(chunk: &str, out: &mut Vec<String>) {
    if chunk.is_empty() {
        return;
    }
    let chars: Vec<(usize, char)> = chunk.char_indices().collect();
    let mut lo = 0;
    let mut hi = chars.len();
    let mut trailing = Vec::new();
    while hi > lo && is_punct(chars[hi - 1].1) {
        hi -= 1;
        trailing.push(chars[hi].1.to_string());
    }
    while lo < hi && is_punct(chars[lo].1) {
        let is_hashtag = chars[lo].1 == '#' && lo + 1 < hi && !is_punct(chars[lo + 1].1);
        if is_hashtag {
            break;
        }
        out.push(chars[lo].1.to_string());
        lo += 1;
    }
    if lo < hi {
        let start = chars[lo].0;
        let end = if hi < chars.len() {
            chars[hi].0
        } else {
            chunk.len()
        };
        split_contraction(&chunk[start..end], out);
    }
    out.extend(trailing.into_iter().rev());
}

fn split_contraction(word: &str, out: &mut Vec<String>) {
    let canon = word.replace('\u{2019}', "'");
    let lower = canon.to_lowercase();
    if lower.len() > 3 && lower.ends_with("n't") {
        let cut = canon.len() - 3;
        out.push(canon[..cut].to_string());
        out.push(canon[cut..].to_string());
        return;
    }
    for clitic in CLITICS {
        if lower.len() > clitic.len() && lower.ends_with(clitic) {
            let cut = canon.len() - clitic.len();
            out.push(canon[..cut].to_string());
            out.push(canon[cut..].to_string());
            return;
        }
    }
    out.push(word.to_string());
}
