//! Accuracy, precision, recall and F1 over a confusion matrix.
//!
//! Task A reports the ironic class only; task B reports unweighted macro
//! averages over the four classes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Task;
use crate::error::{IronyError, Result};

/// How per-class rates collapse into the macro aggregate for task B.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum MacroF1 {
    /// Mean of the per-class F1 values.
    #[default]
    MeanOfF1,
    /// Harmonic mean of macro precision and macro recall.
    F1OfMeans,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub task: Task,
    /// Rows are gold labels, columns predictions.
    pub confusion: Vec<Vec<u64>>,
    pub accuracy: f64,
    pub per_class: Vec<ClassScores>,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub macro_f1: MacroF1,
}

pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn confusion_matrix(gold: &[u32], predicted: &[u32], task: Task) -> Result<Vec<Vec<u64>>> {
    if gold.len() != predicted.len() {
        return Err(IronyError::Validation(format!(
            "gold has {} labels but predictions have {}",
            gold.len(),
            predicted.len()
        )));
    }
    if gold.is_empty() {
        return Err(IronyError::Validation("nothing to evaluate".into()));
    }
    let c = task.num_classes();
    let mut confusion = vec![vec![0u64; c]; c];
    for (i, (&g, &p)) in gold.iter().zip(predicted).enumerate() {
        for (what, label) in [("gold", g), ("predicted", p)] {
            if !task.is_valid_label(label) {
                return Err(IronyError::Validation(format!(
                    "{what} label {label} at position {i} is not valid for task {task}"
                )));
            }
        }
        confusion[g as usize][p as usize] += 1;
    }
    Ok(confusion)
}

pub fn evaluate(gold: &[u32], predicted: &[u32], task: Task) -> Result<EvalReport> {
    evaluate_with(gold, predicted, task, MacroF1::default())
}

pub fn evaluate_with(
    gold: &[u32],
    predicted: &[u32],
    task: Task,
    macro_f1: MacroF1,
) -> Result<EvalReport> {
    let confusion = confusion_matrix(gold, predicted, task)?;
    EvalReport::from_confusion(confusion, task, macro_f1)
}

impl EvalReport {
    pub fn from_confusion(confusion: Vec<Vec<u64>>, task: Task, macro_f1: MacroF1) -> Result<Self> {
        let c = task.num_classes();
        if confusion.len() != c || confusion.iter().any(|row| row.len() != c) {
            return Err(IronyError::Validation(format!(
                "confusion matrix must be {c}x{c} for task {task}"
            )));
        }
        let total: u64 = confusion.iter().flatten().sum();
        if total == 0 {
            return Err(IronyError::Validation("nothing to evaluate".into()));
        }
        let trace: u64 = (0..c).map(|k| confusion[k][k]).sum();

        let per_class: Vec<ClassScores> = (0..c)
            .map(|k| {
                let tp = confusion[k][k];
                let predicted: u64 = confusion.iter().map(|row| row[k]).sum();
                let support: u64 = confusion[k].iter().sum();
                let precision = ratio(tp, predicted);
                let recall = ratio(tp, support);
                ClassScores {
                    precision,
                    recall,
                    f1: f1_score(precision, recall),
                    support,
                }
            })
            .collect();

        let (precision, recall, f1) = match task {
            Task::A => {
                let s = per_class[1];
                (s.precision, s.recall, s.f1)
            }
            Task::B => {
                let n = c as f64;
                let p = per_class.iter().map(|s| s.precision).sum::<f64>() / n;
                let r = per_class.iter().map(|s| s.recall).sum::<f64>() / n;
                let f = match macro_f1 {
                    MacroF1::MeanOfF1 => per_class.iter().map(|s| s.f1).sum::<f64>() / n,
                    MacroF1::F1OfMeans => f1_score(p, r),
                };
                (p, r, f)
            }
        };

        Ok(EvalReport {
            task,
            confusion,
            accuracy: ratio(trace, total),
            per_class,
            precision,
            recall,
            f1,
            macro_f1,
        })
    }

    pub fn total(&self) -> u64 {
        self.confusion.iter().flatten().sum()
    }

    /// Human-readable table, percentages rounded to two decimals.
    pub fn to_table(&self) -> String {
        let names = self.task.class_names();
        let width = names.iter().map(|n| n.len()).max().unwrap_or(0).max(9);
        let mut out = String::new();
        let aggregate = match self.task {
            Task::A => "ironic class",
            Task::B => match self.macro_f1 {
                MacroF1::MeanOfF1 => "macro, mean of F1",
                MacroF1::F1OfMeans => "macro, F1 of means",
            },
        };
        let _ = writeln!(out, "task {}  n={}", self.task, self.total());
        let _ = writeln!(out, "accuracy   {:6.2}", 100.0 * self.accuracy);
        let _ = writeln!(
            out,
            "precision  {:6.2}  ({aggregate})",
            100.0 * self.precision
        );
        let _ = writeln!(out, "recall     {:6.2}", 100.0 * self.recall);
        let _ = writeln!(out, "f1         {:6.2}", 100.0 * self.f1);
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:<width$}  {:>9}  {:>9}  {:>9}  {:>7}",
            "class", "precision", "recall", "f1", "support"
        );
        for (name, s) in names.iter().zip(&self.per_class) {
            let _ = writeln!(
                out,
                "{:<width$}  {:>9.2}  {:>9.2}  {:>9.2}  {:>7}",
                name,
                100.0 * s.precision,
                100.0 * s.recall,
                100.0 * s.f1,
                s.support
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "confusion (rows gold, columns predicted)");
        for (name, row) in names.iter().zip(&self.confusion) {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:>6}")).collect();
            let _ = writeln!(out, "{:<width$}  {}", name, cells.join(""));
        }
        out
    }

    /// Tab-separated `metric\tclass\tvalue` rows at full precision.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("metric\tclass\tvalue\n");
        let _ = writeln!(out, "accuracy\tall\t{}", self.accuracy);
        let _ = writeln!(out, "precision\tall\t{}", self.precision);
        let _ = writeln!(out, "recall\tall\t{}", self.recall);
        let _ = writeln!(out, "f1\tall\t{}", self.f1);
        for (k, s) in self.per_class.iter().enumerate() {
            let _ = writeln!(out, "precision\t{k}\t{}", s.precision);
            let _ = writeln!(out, "recall\t{k}\t{}", s.recall);
            let _ = writeln!(out, "f1\t{k}\t{}", s.f1);
            let _ = writeln!(out, "support\t{k}\t{}", s.support);
        }
        for (g, row) in self.confusion.iter().enumerate() {
            for (p, v) in row.iter().enumerate() {
                let _ = writeln!(out, "confusion\t{g}->{p}\t{v}");
            }
        }
        out
    }

    pub fn write_tsv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_tsv()).map_err(|e| IronyError::io(path, e))
    }
}
