//! Tweet normalization.
//!
//! Stages, always in this order:
//! 1. emoji characters (and `:emoji_name:` aliases) → their descriptive name
//! 2. `@mention` → `<USER>`
//! 3. URLs (`http://`, `https://`, `www.`) → `<URL>`
//! 4. per-token normalization-dictionary lookup, case-insensitive
//! 5. elongation squeeze for dictionary misses (`reeeaaalll` → `real`)
//! 6. lowercase everything except the two sentinels
//!
//! Output tokens are joined by single spaces.

use std::collections::{BTreeSet, HashSet};
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::corpus::RawTweet;
use crate::resources::ResourceBundle;

pub const USER_SENTINEL: &str = "<USER>";
pub const URL_SENTINEL: &str = "<URL>";

static MENTION: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"@+\w+").unwrap());
static URL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)(?:https?://\S*|\bwww\.\S+)").unwrap());
static EMOJI_ALIAS: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r":([A-Za-z0-9][A-Za-z0-9_\-&.'’]*):").unwrap());

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stage {
    Emoji,
    Mention,
    Url,
    Dictionary,
    Elongation,
    Lowercase,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedTweet {
    pub id: u64,
    pub text: String,
    /// Stages that changed the text, in pipeline order.
    pub applied: Vec<Stage>,
}

/// Normalizer with precomputed emoji lookup tables over a borrowed bundle.
pub struct Normalizer<'a> {
    resources: &'a ResourceBundle,
    emoji_starts: HashSet<char>,
    emoji_max_chars: usize,
    emoji_names: BTreeSet<&'a str>,
}

impl<'a> Normalizer<'a> {
    pub fn new(resources: &'a ResourceBundle) -> Self {
        let mut emoji_starts = HashSet::new();
        let mut emoji_max_chars = 0;
        for key in resources.emoji_map.keys() {
            if let Some(c) = key.chars().next() {
                emoji_starts.insert(c);
            }
            emoji_max_chars = emoji_max_chars.max(key.chars().count());
        }
        let emoji_names = resources.emoji_map.values().map(String::as_str).collect();
        Normalizer {
            resources,
            emoji_starts,
            emoji_max_chars,
            emoji_names,
        }
    }

    pub fn normalize(&self, raw: &RawTweet) -> NormalizedTweet {
        let (text, applied) = self.normalize_text(&raw.text);
        NormalizedTweet {
            id: raw.id,
            text,
            applied,
        }
    }

    pub fn normalize_text(&self, input: &str) -> (String, Vec<Stage>) {
        let mut applied = Vec::new();
        let mut note = |changed: bool, stage: Stage| {
            if changed {
                applied.push(stage);
            }
        };

        let text = self.replace_emoji(input);
        note(text != input, Stage::Emoji);

        let masked = MENTION.replace_all(&text, USER_SENTINEL);
        note(masked != text, Stage::Mention);

        let linked = URL.replace_all(&masked, URL_SENTINEL);
        note(linked != masked, Stage::Url);

        let mut dict_hit = false;
        let mut squeezed = false;
        let tokens: Vec<String> = linked
            .split_whitespace()
            .map(|tok| {
                let (out, how) = self.normalize_token(tok);
                dict_hit |= how == Some(Stage::Dictionary);
                squeezed |= how == Some(Stage::Elongation);
                out
            })
            .collect();
        note(dict_hit, Stage::Dictionary);
        note(squeezed, Stage::Elongation);

        let joined = tokens.join(" ");
        let lowered = lowercase_keeping_sentinels(&joined);
        note(lowered != joined, Stage::Lowercase);
        (lowered, applied)
    }

    fn replace_emoji(&self, input: &str) -> String {
        let mut out = String::with_capacity(input.len());
        if !self.emoji_starts.is_empty() {
            let chars: Vec<char> = input.chars().collect();
            let mut i = 0;
            let mut buf = String::new();
            'outer: while i < chars.len() {
                if self.emoji_starts.contains(&chars[i]) {
                    let longest = self.emoji_max_chars.min(chars.len() - i);
                    for len in (1..=longest).rev() {
                        buf.clear();
                        buf.extend(&chars[i..i + len]);
                        if let Some(name) = self.resources.emoji_map.get(&buf) {
                            out.push(' ');
                            out.push_str(name);
                            out.push(' ');
                            i += len;
                            continue 'outer;
                        }
                    }
                }
                out.push(chars[i]);
                i += 1;
            }
        } else {
            out.push_str(input);
        }
        if self.emoji_names.is_empty() || !out.contains(':') {
            return out;
        }
        EMOJI_ALIAS
            .replace_all(&out, |caps: &regex::Captures<'_>| {
                let name = sanitize_emoji_name(&caps[1]);
                if self.emoji_names.contains(name.as_str()) {
                    format!(" {name} ")
                } else {
                    caps[0].to_string()
                }
            })
            .into_owned()
    }

    fn normalize_token(&self, tok: &str) -> (String, Option<Stage>) {
        if tok.contains(USER_SENTINEL) || tok.contains(URL_SENTINEL) || tok.starts_with('#') {
            return (tok.to_string(), None);
        }
        let dict = &self.resources.normalization_dict;
        let lower = tok.to_lowercase();
        if let Some(canon) = dict.get(&lower) {
            return (canon.clone(), Some(Stage::Dictionary));
        }
        let (lead, core, trail) = split_edges(tok);
        if core.is_empty() {
            return (tok.to_string(), None);
        }
        let core_l = core.to_lowercase();
        if self.emoji_names.contains(core_l.as_str()) {
            return (tok.to_string(), None);
        }
        if let Some(canon) = dict.get(&core_l) {
            return (format!("{lead}{canon}{trail}"), Some(Stage::Dictionary));
        }
        if has_letter_run(&core_l, 3) {
            let fixed = self.unelongate(&core_l);
            return (format!("{lead}{fixed}{trail}"), Some(Stage::Elongation));
        }
        (tok.to_string(), None)
    }

    /// Squeeze runs of 3+ identical letters to 2, then to 1, preferring the
    /// first form the dictionary or known-word list recognises.
    fn unelongate(&self, word: &str) -> String {
        let dict = &self.resources.normalization_dict;
        let known = |w: &str| {
            self.resources.known_words.contains(w)
                || self.resources.positive_lexicon.contains(w)
                || self.resources.negative_lexicon.contains(w)
                || dict.values().any(|v| v == w)
        };
        let two = squeeze(word, 2);
        if let Some(c) = dict.get(&two) {
            return c.clone();
        }
        if known(&two) {
            return two;
        }
        let one = squeeze(word, 1);
        if let Some(c) = dict.get(&one) {
            return c.clone();
        }
        if known(&one) {
            return one;
        }
        two
    }
}

/// Normalizes one tweet against `resources`.
pub fn normalize_tweet(raw: &RawTweet, resources: &ResourceBundle) -> NormalizedTweet {
    Normalizer::new(resources).normalize(raw)
}

/// Lowercased ASCII form of an emoji name with runs of other characters
/// collapsed to `_`.
pub fn sanitize_emoji_name(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    for c in name.chars().flat_map(char::to_lowercase) {
        if c.is_ascii_alphanumeric() || c == '_' {
            out.push(c);
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    let trimmed = out.trim_matches('_');
    let mut collapsed = String::with_capacity(trimmed.len());
    for c in trimmed.chars() {
        if !(c == '_' && collapsed.ends_with('_')) {
            collapsed.push(c);
        }
    }
    collapsed
}

fn is_edge_punct(c: char) -> bool {
    !c.is_alphanumeric() && c != '_'
}

fn split_edges(tok: &str) -> (&str, &str, &str) {
    let start = tok
        .char_indices()
        .find(|&(_, c)| !is_edge_punct(c))
        .map(|(i, _)| i)
        .unwrap_or(tok.len());
    let end = tok
        .char_indices()
        .rev()
        .find(|&(_, c)| !is_edge_punct(c))
        .map(|(i, c)| i + c.len_utf8())
        .unwrap_or(start);
    (&tok[..start], &tok[start..end], &tok[end..])
}

fn has_letter_run(word: &str, min: usize) -> bool {
    let mut prev = None;
    let mut run = 0;
    for c in word.chars() {
        if Some(c) == prev && c.is_alphabetic() {
            run += 1;
            if run >= min {
                return true;
            }
        } else {
            prev = Some(c);
            run = 1;
        }
    }
    false
}

/// Caps every run of identical letters at `max` repetitions.
pub fn squeeze(word: &str, max: usize) -> String {
    let mut out = String::with_capacity(word.len());
    let mut prev = None;
    let mut run = 0;
    for c in word.chars() {
        if Some(c) == prev {
            run += 1;
        } else {
            prev = Some(c);
            run = 1;
        }
        if !c.is_alphabetic() || run <= max {
            out.push(c);
        }
    }
    out
}

fn lowercase_keeping_sentinels(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    loop {
        let next = [USER_SENTINEL, URL_SENTINEL]
            .iter()
            .filter_map(|s| rest.find(s).map(|i| (i, *s)))
            .min();
        match next {
            Some((i, s)) => {
                out.push_str(&rest[..i].to_lowercase());
                out.push_str(s);
                rest = &rest[i + s.len()..];
            }
            None => {
                out.push_str(&rest.to_lowercase());
                return out;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resources::{default_resource_dir, ResourceBundle};
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn toy_bundle() -> ResourceBundle {
        let mut b = ResourceBundle::default();
        b.normalization_dict = BTreeMap::from([
            ("reeeaaalll".to_string(), "real".to_string()),
            ("u".to_string(), "you".to_string()),
            ("gonna".to_string(), "going to".to_string()),
        ]);
        b.emoji_map = BTreeMap::from([
            (
                "\u{1F602}".to_string(),
                "face_with_tears_of_joy".to_string(),
            ),
            ("\u{1F4A4}".to_string(), "zzz".to_string()),
        ]);
        b.known_words = ["so", "good", "cool"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        b
    }

    fn norm(text: &str) -> String {
        let b = toy_bundle();
        Normalizer::new(&b).normalize_text(text).0
    }

    #[test]
    fn mention_replaced() {
        assert_eq!(
            norm("@coreybking thanks for the spoiler!!!!"),
            "<USER> thanks for the spoiler!!!!"
        );
    }

    #[test]
    fn dictionary_entry() {
        assert_eq!(norm("reeeaaalll"), "real");
        assert_eq!(norm("U r gonna win"), "you r going to win");
    }

    #[test]
    fn elongation_without_dictionary_entry() {
        let mut b = toy_bundle();
        b.normalization_dict.clear();
        b.known_words.insert("real".into());
        let n = Normalizer::new(&b);
        assert_eq!(n.normalize_text("reeeaaalll").0, "real");
        assert_eq!(n.normalize_text("Sooooo gooood!!!").0, "so good!!!");
        // Unknown after both squeezes: keep the two-letter form.
        assert_eq!(n.normalize_text("blaaaarg").0, "blaarg");
    }

    #[test]
    fn url_replaced() {
        assert_eq!(norm("see https://t.co/x now"), "see <URL> now");
        assert_eq!(norm("go to www.example.com!"), "go to <URL>");
        assert_eq!(norm("HTTP://X.CO"), "<URL>");
        // Elongated "aww" followed by dots is not a www. link.
        assert_eq!(norm("awww..."), "aww...");
    }

    #[test]
    fn empty_input() {
        assert_eq!(norm(""), "");
    }

    #[test]
    fn emoji_and_alias() {
        assert_eq!(norm("lol\u{1F602}"), "lol face_with_tears_of_joy");
        assert_eq!(
            norm("great :face_with_tears_of_joy:"),
            "great face_with_tears_of_joy"
        );
        assert_eq!(norm("time: 10:30:"), "time: 10:30:");
        // Emoji names are protected from squeezing.
        assert_eq!(norm("\u{1F4A4}"), "zzz");
    }

    #[test]
    fn applied_stages_reported() {
        let b = toy_bundle();
        let (_, applied) = Normalizer::new(&b).normalize_text("@Bob u See http://x.y");
        assert_eq!(
            applied,
            vec![
                Stage::Mention,
                Stage::Url,
                Stage::Dictionary,
                Stage::Lowercase
            ]
        );
    }

    #[test]
    fn hashtags_pass_through() {
        assert_eq!(norm("#Sooo #not"), "#sooo #not");
    }

    #[test]
    fn squeeze_caps_runs() {
        assert_eq!(squeeze("reeeaaalll", 2), "reeaall");
        assert_eq!(squeeze("reeeaaalll", 1), "real");
        assert_eq!(squeeze("1111", 1), "1111");
    }

    #[test]
    fn sanitize_names() {
        assert_eq!(sanitize_emoji_name("Face_With_Tears"), "face_with_tears");
        assert_eq!(
            sanitize_emoji_name("A_button_(blood_type)"),
            "a_button_blood_type"
        );
    }

    fn tweet_text() -> impl Strategy<Value = String> {
        let piece = prop_oneof![
            "[a-zA-Z]{1,8}",
            ("[a-z]{1,3}", "[a-z]", 3usize..6, "[a-z]{0,3}")
                .prop_map(|(a, c, n, b)| format!("{a}{}{b}", c.repeat(n))),
            "@[A-Za-z0-9_]{1,10}",
            "https?://[a-z./]{1,12}",
            "www\\.[a-z]{2,8}\\.com",
            "[!?.,:;]{1,4}",
            "#[a-zA-Z]{1,8}",
            Just("\u{1F602}".to_string()),
            Just(":face_with_tears_of_joy:".to_string()),
            Just("u".to_string()),
            Just("GONNA".to_string()),
            "[^\\s]{1,6}",
        ];
        prop::collection::vec(piece, 0..12).prop_map(|v| v.join(" "))
    }

    proptest! {
        #[test]
        fn idempotent(text in tweet_text()) {
            let b = toy_bundle();
            let n = Normalizer::new(&b);
            let once = n.normalize_text(&text).0;
            let twice = n.normalize_text(&once).0;
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn no_mentions_or_urls_survive(text in tweet_text()) {
            let out = norm(&text);
            prop_assert!(!out.contains("http://") && !out.contains("https://"));
            prop_assert!(!MENTION.is_match(&out.replace(USER_SENTINEL, "")) || !out.contains('@'));
            for tok in out.split_whitespace() {
                prop_assert!(!(tok.starts_with('@') && tok.len() > 1
                    && tok[1..].chars().next().is_some_and(|c| c.is_alphanumeric() || c == '_')));
            }
        }

        #[test]
        fn plain_words_only_lowercased(word in "[a-zA-Z]{1,10}") {
            prop_assume!(!has_letter_run(&word.to_lowercase(), 3));
            let b = ResourceBundle::default();
            let out = Normalizer::new(&b).normalize_text(&word).0;
            prop_assert_eq!(out, word.to_lowercase());
        }
    }

    #[test]
    fn shipped_resources_idempotent_on_samples() {
        let b = ResourceBundle::load_dir(default_resource_dir(), None, 300).unwrap();
        let n = Normalizer::new(&b);
        for s in [
            "I just love when you test my patience!! #not",
            "Sooooo happy 2day \u{1F602}\u{1F602} @bob http://t.co/abc",
            "idk wat ur talking about lol",
            "It is awesome to go to bed at 3 am",
            "reeeaaalll gooood",
        ] {
            let once = n.normalize_text(s).0;
            assert_eq!(n.normalize_text(&once).0, once, "{s}");
        }
        assert_eq!(n.normalize_text("reeeaaalll").0, "real");
    }
}
