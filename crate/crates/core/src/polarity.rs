//! The 12-value polarity block: lexicon word and emoji counts, presence
//! flags, negation, and contrast signals.

use crate::resources::{Polarity, ResourceBundle};

pub const POLARITY_WIDTH: usize = 12;

pub const POLARITY_NAMES: [&str; POLARITY_WIDTH] = [
    "positive_words",
    "negative_words",
    "positive_emoji",
    "negative_emoji",
    "has_positive_word",
    "has_negative_word",
    "has_positive_emoji",
    "has_negative_emoji",
    "has_negation",
    "word_balance",
    "word_contrast",
    "total_signals",
];

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Words listed in both lexicons count on both sides.
pub fn polarity_block(tokens: &[String], resources: &ResourceBundle) -> [f64; POLARITY_WIDTH] {
    let (mut pos, mut neg, mut pos_e, mut neg_e) = (0.0, 0.0, 0.0, 0.0);
    let mut negation = false;
    for t in tokens {
        let w = t.to_lowercase();
        if resources.positive_lexicon.contains(&w) {
            pos += 1.0;
        }
        if resources.negative_lexicon.contains(&w) {
            neg += 1.0;
        }
        match resources.emoji_polarity.get(&w) {
            Some(Polarity::Positive) => pos_e += 1.0,
            Some(Polarity::Negative) => neg_e += 1.0,
            None => {}
        }
        negation |= resources.negation_words.contains(&w);
    }
    [
        pos,
        neg,
        pos_e,
        neg_e,
        flag(pos > 0.0),
        flag(neg > 0.0),
        flag(pos_e > 0.0),
        flag(neg_e > 0.0),
        flag(negation),
        pos - neg,
        flag(pos > 0.0 && neg > 0.0),
        pos + neg + pos_e + neg_e,
    ]
}
