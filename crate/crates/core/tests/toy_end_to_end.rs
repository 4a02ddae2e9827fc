//! The default configuration on the 30-tweet fixture, through the binary.
//! Kept in its own test target so the timing is not shared with other tests.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

#[test]
fn default_train_and_predict_under_a_minute() {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let toy = fixtures.join("toy-A.txt");
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("toy.irony");
    let preds = dir.path().join("toy.tsv");
    let bin = env!("CARGO_BIN_EXE_irony");

    let start = Instant::now();
    let out = Command::new(bin)
        .args(["train", "--task", "A", "--train"])
        .arg(&toy)
        .arg("--model")
        .arg(&model)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let out = Command::new(bin)
        .args(["predict", "--task", "A", "-m"])
        .arg(&model)
        .arg("-i")
        .arg(&toy)
        .arg("-o")
        .arg(&preds)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");

    let text = std::fs::read_to_string(&preds).unwrap();
    assert_eq!(text.lines().count(), 31);
    // Ten members vote on every tweet.
    assert!(text
        .lines()
        .skip(1)
        .all(|l| l.split('\t').count() == 2 + 10 + 2));
}
