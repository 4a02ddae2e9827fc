//! Trains the shipped POS tagger weights from `word/TAG` corpora (one
//! sentence or paragraph per line), e.g. the tagged WSJ and OANC samples
//! bundled with the pattern library.
//!
//! cargo run --release -p irony-core --example train_tagger -- \
//!     [--prune X] [--iterations N] [--eval HELDOUT] OUT CORPUS...

use std::fs;

use irony_core::tagger::{tag_index, PosTaggerModel};

type Sentence = (Vec<String>, Vec<String>);

fn parse_line(line: &str) -> Option<Sentence> {
    let mut words = Vec::new();
    let mut tags = Vec::new();
    let mut open_quote = true;
    for item in line.split_whitespace() {
        let (word, tag) = item.rsplit_once('/')?;
        let tag = tag.split('|').next()?;
        let tag = match tag {
            "\"" => {
                open_quote = !open_quote;
                if open_quote {
                    "''"
                } else {
                    "``"
                }
            }
            t => t,
        };
        tag_index(tag)?;
        // Tweets reach the tagger lowercased.
        words.push(word.to_lowercase());
        tags.push(tag.to_string());
    }
    (!words.is_empty()).then_some((words, tags))
}

fn read_corpus(path: &str) -> Vec<Sentence> {
    let text = fs::read_to_string(path).expect("read corpus");
    text.lines().filter_map(parse_line).collect()
}

fn main() {
    let mut args: Vec<String> = std::env::args().skip(1).collect();
    let mut prune = 1.0;
    let mut heldout = None;
    let mut iterations = 5;
    while args.first().is_some_and(|a| a.starts_with("--")) {
        let flag = args.remove(0);
        let value = args.remove(0);
        match flag.as_str() {
            "--prune" => prune = value.parse().expect("prune"),
            "--eval" => heldout = Some(value),
            "--iterations" => iterations = value.parse().expect("iterations"),
            other => panic!("unknown flag {other}"),
        }
    }
    let (out, corpora) = args
        .split_first()
        .expect("usage: train_tagger OUT CORPUS...");
    let sentences: Vec<Sentence> = corpora.iter().flat_map(|p| read_corpus(p)).collect();
    eprintln!("{} sequences", sentences.len());
    let model = PosTaggerModel::train(&sentences, iterations, 1, prune).expect("train");
    eprintln!("{} features", model.num_features());
    if let Some(path) = heldout {
        let (mut right, mut total) = (0usize, 0usize);
        for (words, gold) in read_corpus(&path) {
            let guess = model.tag(&words);
            right += guess
                .iter()
                .zip(&gold)
                .filter(|(g, t)| **g == t.as_str())
                .count();
            total += gold.len();
        }
        eprintln!(
            "held-out accuracy {:.4} on {total} tokens",
            right as f64 / total as f64
        );
    }
    model.save(out).expect("write weights");
}
