//! Ten-fold training and plurality voting: member `i` trains on every fold
//! but `i` and early-stops on fold `i`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ndarray::{Array2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{LabeledCorpus, Task};
use crate::error::{IronyError, Result};
use crate::lsi::SvdMethod;
use crate::mlp::{argmax, train, MlpConfig, MlpModel, TrainingLog};
use crate::pipeline::{FeaturePipeline, PipelineConfig};
use crate::resources::ResourceBundle;
use crate::tagger::PosTaggerModel;
use crate::tokenize::TokenizedTweet;

pub const DEFAULT_FOLDS: usize = 10;

/// Stratified fold index for every position of `labels`. Each class's
/// positions are shuffled and dealt round-robin; the dealing position carries
/// over from one class to the next so fold sizes differ by at most one.
pub fn split_folds(labels: &[u32], k: usize, seed: u64) -> Result<Vec<usize>> {
    if k == 0 || k > labels.len() {
        return Err(IronyError::Config(format!(
            "cannot split {} tweets into {k} folds",
            labels.len()
        )));
    }
    let mut by_class: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        by_class.entry(l).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![0; labels.len()];
    let mut next = 0;
    for members in by_class.values_mut() {
        members.shuffle(&mut rng);
        for &i in members.iter() {
            folds[i] = next % k;
            next += 1;
        }
    }
    Ok(folds)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub folds: usize,
    pub mlp: MlpConfig,
    pub pipeline: PipelineConfig,
    /// Members trained concurrently.
    pub jobs: usize,
    pub seed: u64,
}

impl EnsembleConfig {
    pub fn for_task(task: Task) -> Self {
        EnsembleConfig {
            folds: DEFAULT_FOLDS,
            mlp: MlpConfig::for_task(task),
            pipeline: PipelineConfig::default(),
            jobs: 1,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleModel {
    pub task: Task,
    pub pipeline: FeaturePipeline,
    pub members: Vec<MlpModel>,
    pub fold_assignment: BTreeMap<u64, u32>,
    pub config: EnsembleConfig,
    pub logs: Vec<TrainingLog>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vote {
    pub label: u32,
    /// Votes per class.
    pub counts: Vec<u32>,
    pub mean_probs: Vec<f64>,
}

/// Mean over members, summed in sorted order so member order cannot matter.
fn mean_probs(probs: &[Vec<f64>], num_classes: usize) -> Vec<f64> {
    (0..num_classes)
        .map(|c| {
            let mut col: Vec<f64> = probs.iter().map(|p| p[c]).collect();
            col.sort_by(f64::total_cmp);
            col.iter().sum::<f64>() / probs.len().max(1) as f64
        })
        .collect()
}

fn tally(labels: &[u32], num_classes: usize) -> Vec<u32> {
    let mut counts = vec![0; num_classes];
    for &l in labels {
        counts[l as usize] += 1;
    }
    counts
}

/// Plurality vote; ties go to the highest mean probability, then the lowest
/// class id.
pub fn vote(labels: &[u32], probs: &[Vec<f64>], num_classes: usize) -> Vote {
    let counts = tally(labels, num_classes);
    let mean = mean_probs(probs, num_classes);
    if let Some(&first) = labels.first() {
        if labels.iter().all(|&l| l == first) {
            return Vote {
                label: first,
                counts,
                mean_probs: mean,
            };
        }
    }
    full_tally(counts, mean)
}

fn full_tally(counts: Vec<u32>, mean: Vec<f64>) -> Vote {
    let top = counts.iter().copied().max().unwrap_or(0);
    let mut label = None::<usize>;
    for c in (0..counts.len()).filter(|&c| counts[c] == top) {
        label = match label {
            Some(b) if mean[b] >= mean[c] => Some(b),
            _ => Some(c),
        };
    }
    Vote {
        label: label.unwrap_or(0) as u32,
        counts,
        mean_probs: mean,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub id: u64,
    pub label: u32,
    /// Label chosen by each member, in member order.
    pub member_labels: Vec<u32>,
    pub mean_probs: Vec<f64>,
}

fn feature_rows(x: &Array2<f64>, indices: &[usize]) -> Array2<f64> {
    x.select(Axis(0), indices)
}

/// Fits the pipeline once on the whole corpus, then trains one member per
/// fold. `prepared` must be the corpus tweets, in order, already tokenized
/// and tagged.
pub fn train_ensemble(
    corpus: &LabeledCorpus,
    prepared: &[TokenizedTweet],
    resources: ResourceBundle,
    tagger: PosTaggerModel,
    config: &EnsembleConfig,
    extra_brown: &[Vec<String>],
) -> Result<EnsembleModel> {
    if prepared.len() != corpus.len() {
        return Err(IronyError::Internal(
            "prepared tweets do not match the corpus".into(),
        ));
    }
    if config.folds < 2 {
        return Err(IronyError::Config(
            "the ensemble needs at least 2 folds".into(),
        ));
    }
    config.mlp.validate()?;
    let mut pipeline_config = config.pipeline.clone();
    if let SvdMethod::Randomized { .. } = pipeline_config.svd {
        pipeline_config.svd = SvdMethod::Randomized { seed: config.seed };
    }
    let pipeline = FeaturePipeline::fit(prepared, resources, tagger, pipeline_config, extra_brown)?;
    let x = pipeline.transform_batch(prepared)?;
    let labels = corpus.labels();
    let folds = split_folds(&labels, config.folds, config.seed)?;
    let dims = [
        pipeline.width(),
        config.mlp.hidden.0,
        config.mlp.hidden.1,
        corpus.task.num_classes(),
    ];

    let train_member = |i: usize| -> Result<(MlpModel, TrainingLog)> {
        let (tr, va): (Vec<usize>, Vec<usize>) = (0..labels.len()).partition(|&j| folds[j] != i);
        let ty: Vec<u32> = tr.iter().map(|&j| labels[j]).collect();
        let vy: Vec<u32> = va.iter().map(|&j| labels[j]).collect();
        let mut mlp = config.mlp.clone();
        mlp.seed = config.seed.wrapping_add(i as u64);
        let init = MlpModel::init(dims, mlp.seed)?;
        log::info!(
            "member {i}: {} train / {} validation tweets",
            tr.len(),
            va.len()
        );
        let (tx, vx) = (feature_rows(&x, &tr), feature_rows(&x, &va));
        train(init, tx.view(), &ty, vx.view(), &vy, &mlp)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.max(1))
        .build()
        .map_err(|e| IronyError::Internal(e.to_string()))?;
    let trained: Vec<(MlpModel, TrainingLog)> = pool.install(|| {
        (0..config.folds)
            .into_par_iter()
            .map(|i| train_member(i).map_err(|e| e.in_fold(i)))
            .collect::<Result<_>>()
    })?;
    let (members, logs) = trained.into_iter().unzip();
    Ok(EnsembleModel {
        task: corpus.task,
        pipeline,
        members,
        fold_assignment: corpus
            .tweets
            .iter()
            .zip(&folds)
            .map(|(t, &f)| (t.id, f as u32))
            .collect(),
        config: config.clone(),
        logs,
    })
}

impl EnsembleModel {
    pub fn num_classes(&self) -> usize {
        self.task.num_classes()
    }

    pub fn predict_matrix(&self, ids: &[u64], x: &Array2<f64>) -> Result<Vec<Prediction>> {
        let outputs: Vec<Array2<f64>> = self
            .members
            .iter()
            .map(|m| m.forward_batch(x.view()))
            .collect::<Result<_>>()?;
        Ok(ids
            .iter()
            .enumerate()
            .map(|(r, &id)| {
                let probs: Vec<Vec<f64>> = outputs.iter().map(|o| o.row(r).to_vec()).collect();
                let labels: Vec<u32> = probs.iter().map(|p| argmax(p) as u32).collect();
                let v = vote(&labels, &probs, self.num_classes());
                Prediction {
                    id,
                    label: v.label,
                    member_labels: labels,
                    mean_probs: v.mean_probs,
                }
            })
            .collect())
    }

    pub fn predict_tokenized(&self, tweets: &[TokenizedTweet]) -> Result<Vec<Prediction>> {
        let x = self.pipeline.transform_batch(tweets)?;
        let ids: Vec<u64> = tweets.iter().map(|t| t.id).collect();
        self.predict_matrix(&ids, &x)
    }
}

/// `id, label, vote_0.., prob_0..` with a header row.
pub fn predictions_tsv(preds: &[Prediction], members: usize, num_classes: usize) -> String {
    let mut out = String::from("id\tlabel");
    for i in 0..members {
        let _ = write!(out, "\tvote_{i}");
    }
    for c in 0..num_classes {
        let _ = write!(out, "\tprob_{c}");
    }
    out.push('\n');
    for p in preds {
        let _ = write!(out, "{}\t{}", p.id, p.label);
        for v in &p.member_labels {
            let _ = write!(out, "\t{v}");
        }
        for v in &p.mean_probs {
            let _ = write!(out, "\t{v}");
        }
        out.push('\n');
    }
    out
}

pub fn write_predictions(
    path: impl AsRef<Path>,
    preds: &[Prediction],
    members: usize,
    num_classes: usize,
) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, predictions_tsv(preds, members, num_classes))
        .map_err(|e| IronyError::io(path, e))
}

/// Reads `id` and `label` from a predictions file, in file order.
pub fn read_predictions(path: impl AsRef<Path>) -> Result<Vec<(u64, u32)>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| IronyError::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || (i == 0 && line.starts_with("id\t")) {
            continue;
        }
        let mut cols = line.split('\t');
        let parse = |s: Option<&str>| s.and_then(|s| s.trim().parse::<u64>().ok());
        match (parse(cols.next()), parse(cols.next())) {
            (Some(id), Some(label)) if label <= u64::from(u32::MAX) => out.push((id, label as u32)),
            _ => {
                return Err(IronyError::parse(
                    path,
                    i + 1,
                    "expected `id \\t label ...`",
                ))
            }
        }
    }
    if out.is_empty() {
        return Err(IronyError::Validation(format!(
            "{}: no data rows",
            path.display()
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn balanced_binary_folds() {
        let labels: Vec<u32> = (0..100).map(|i| (i % 2) as u32).collect();
        let f = split_folds(&labels, 10, 3).unwrap();
        for k in 0..10 {
            for c in 0..2 {
                let n = (0..100).filter(|&i| f[i] == k && labels[i] == c).count();
                assert_eq!(n, 5);
            }
        }
        assert_eq!(f, split_folds(&labels, 10, 3).unwrap());
        assert!(split_folds(&labels, 1, 3).unwrap().iter().all(|&x| x == 0));
        assert!(split_folds(&labels[..5], 10, 3).is_err());
    }

    #[test]
    fn unanimous_vote() {
        let probs = vec![vec![0.2, 0.8]; 10];
        let v = vote(&[1; 10], &probs, 2);
        assert_eq!((v.label, v.counts.clone()), (1, vec![0, 10]));
        assert_eq!(v, full_tally(tally(&[1; 10], 2), mean_probs(&probs, 2)));
    }

    #[test]
    fn tie_goes_to_higher_mean_probability() {
        let mut labels = vec![0; 5];
        labels.extend([1; 5]);
        let mut probs = vec![vec![0.50, 0.50]; 5];
        probs.extend(vec![vec![0.46, 0.54]; 5]);
        // Class 0 mean 0.48, class 1 mean 0.52.
        assert_eq!(vote(&labels, &probs, 2).label, 1);
        let even = vec![vec![0.5, 0.5]; 10];
        assert_eq!(vote(&labels, &even, 2).label, 0);
    }

    #[test]
    fn plurality_over_three_classes() {
        let labels = [2, 2, 2, 2, 0, 0, 0, 1, 1, 1];
        let probs = vec![vec![0.4, 0.3, 0.3]; 10];
        assert_eq!(vote(&labels, &probs, 3).label, 2);
    }

    #[test]
    fn predictions_round_trip() {
        let preds = vec![Prediction {
            id: 7,
            label: 1,
            member_labels: vec![1, 0],
            mean_probs: vec![0.25, 0.75],
        }];
        let tsv = predictions_tsv(&preds, 2, 2);
        assert_eq!(
            tsv,
            "id\tlabel\tvote_0\tvote_1\tprob_0\tprob_1\n7\t1\t1\t0\t0.25\t0.75\n"
        );
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("p.tsv");
        write_predictions(&p, &preds, 2, 2).unwrap();
        assert_eq!(read_predictions(&p).unwrap(), vec![(7, 1)]);
    }

    fn member_outputs() -> impl Strategy<Value = (Vec<u32>, Vec<Vec<f64>>)> {
        prop::collection::vec((0u32..4, prop::collection::vec(0.0f64..1.0, 4)), 1..11)
            .prop_map(|v| v.into_iter().unzip())
    }

    proptest! {
        #[test]
        fn folds_partition_and_balance(labels in prop::collection::vec(0u32..4, 10..200), k in 2usize..11, seed in any::<u64>()) {
            let f = split_folds(&labels, k, seed).unwrap();
            let mut sizes = vec![0usize; k];
            for &x in &f { sizes[x] += 1; }
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
            for c in 0..4u32 {
                let per: Vec<usize> = (0..k).map(|fold| (0..labels.len()).filter(|&i| f[i] == fold && labels[i] == c).count()).collect();
                prop_assert!(per.iter().max().unwrap() - per.iter().min().unwrap() <= 1);
            }
        }

        #[test]
        fn vote_ignores_member_order((labels, probs) in member_outputs(), rot in 0usize..10) {
            let n = labels.len();
            let r = rot % n;
            let mut l2 = labels.clone();
            let mut p2 = probs.clone();
            l2.rotate_left(r);
            p2.rotate_left(r);
            l2.reverse();
            p2.reverse();
            prop_assert_eq!(vote(&labels, &probs, 4), vote(&l2, &p2, 4));
            let full = full_tally(tally(&labels, 4), mean_probs(&probs, 4));
            prop_assert_eq!(vote(&labels, &probs, 4).label, full.label);
        }
    }
}
