//! End-to-end operations shared by the command line, the C interface and
//! the acceptance harness.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::{PathsSection, RunConfig};
use crate::corpus::{load_dataset, LabeledCorpus, RawTweet, Task};
use crate::ensemble::{split_folds, train_ensemble, EnsembleConfig, EnsembleModel, Prediction};
use crate::error::{IronyError, Result};
use crate::metrics::{evaluate, EvalReport};
use crate::pipeline::prepare_tweets;
use crate::resources::{default_resource_dir, layout, ResourceBundle};
use crate::tagger::{read_sidecar_tags, PosTaggerModel};
use crate::tokenize::TokenizedTweet;

pub fn resource_dir(paths: &PathsSection) -> PathBuf {
    paths.resources.clone().unwrap_or_else(default_resource_dir)
}

fn require(path: &Path, resource: &'static str) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(IronyError::MissingResource {
            resource,
            path: path.to_path_buf(),
        })
    }
}

/// Loads the lexicons, dictionaries, optional embeddings and the tagger.
pub fn load_resources(
    paths: &PathsSection,
    embedding_dim: usize,
) -> Result<(ResourceBundle, PosTaggerModel)> {
    let dir = resource_dir(paths);
    require(&dir, "resource directory")?;
    for (rel, what) in [
        (layout::POSITIVE, "positive lexicon"),
        (layout::NEGATIVE, "negative lexicon"),
        (layout::NORM_DICT, "normalization dictionary"),
        (layout::KNOWN_WORDS, "known-word list"),
        (layout::EMOJI_MAP, "emoji map"),
        (layout::EMOJI_POLARITY, "emoji polarity table"),
    ] {
        require(&dir.join(rel), what)?;
    }
    if let Some(e) = &paths.embeddings {
        require(e, "word embeddings")?;
    }
    let tagger_path = paths
        .tagger
        .clone()
        .unwrap_or_else(|| dir.join(layout::TAGGER));
    require(&tagger_path, "POS tagger model")?;
    if paths.embeddings.is_none() {
        log::warn!("no embedding file configured; the embedding block will be all zeros");
    }
    let bundle = ResourceBundle::load_dir(&dir, paths.embeddings.as_deref(), embedding_dim)?;
    let tagger = PosTaggerModel::load(&tagger_path)?;
    Ok((bundle, tagger))
}

/// One whitespace-tokenized sentence per non-blank line.
pub fn read_sentences(path: impl AsRef<Path>) -> Result<Vec<Vec<String>>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| IronyError::io(path, e))?;
    Ok(text
        .lines()
        .map(|l| l.split_whitespace().map(str::to_string).collect::<Vec<_>>())
        .filter(|s| !s.is_empty())
        .collect())
}

fn load_sidecar(path: Option<&Path>) -> Result<Option<BTreeMap<u64, Vec<String>>>> {
    path.map(read_sidecar_tags).transpose()
}

/// Trains an ensemble on an in-memory corpus.
pub fn train_on(
    corpus: &LabeledCorpus,
    resources: ResourceBundle,
    tagger: PosTaggerModel,
    config: &EnsembleConfig,
    sidecar: Option<&BTreeMap<u64, Vec<String>>>,
    extra_brown: &[Vec<String>],
) -> Result<EnsembleModel> {
    let prepared = prepare_tweets(&corpus.tweets, &resources, &tagger, sidecar)?;
    train_ensemble(corpus, &prepared, resources, tagger, config, extra_brown)
}

/// Trains from the files named in `run`.
pub fn train_from_config(run: &RunConfig) -> Result<EnsembleModel> {
    let train = run
        .paths
        .train
        .as_ref()
        .ok_or_else(|| IronyError::Config("no training dataset given".into()))?;
    let corpus = load_dataset(train, run.task)?;
    let (resources, tagger) = load_resources(&run.paths, run.embedding_dim)?;
    let sidecar = load_sidecar(run.paths.tags.as_deref())?;
    let extra = match &run.paths.brown_corpus {
        Some(p) => read_sentences(p)?,
        None => Vec::new(),
    };
    log::info!(
        "training task {} on {} tweets ({})",
        corpus.task,
        corpus.len(),
        corpus.provenance
    );
    train_on(
        &corpus,
        resources,
        tagger,
        &run.ensemble,
        sidecar.as_ref(),
        &extra,
    )
}

/// Fails when a requested task or any gold label disagrees with the model.
pub fn check_task(
    model: &EnsembleModel,
    requested: Option<Task>,
    tweets: &[RawTweet],
) -> Result<()> {
    if let Some(t) = requested {
        if t != model.task {
            return Err(IronyError::TaskMismatch(format!(
                "model was trained for task {} but task {t} was requested",
                model.task
            )));
        }
    }
    if let Some(bad) = tweets
        .iter()
        .find(|t| t.label.is_some_and(|l| !model.task.is_valid_label(l)))
    {
        return Err(IronyError::TaskMismatch(format!(
            "tweet {} has label {} which does not exist in task {}",
            bad.id,
            bad.label.unwrap_or_default(),
            model.task
        )));
    }
    Ok(())
}

pub fn predict_tweets(
    model: &EnsembleModel,
    tweets: &[RawTweet],
    sidecar: Option<&BTreeMap<u64, Vec<String>>>,
) -> Result<Vec<Prediction>> {
    let prepared = model.pipeline.prepare(tweets, sidecar)?;
    model.predict_tokenized(&prepared)
}

/// Majority-class accuracy on `labels`.
pub fn majority_baseline(labels: &[u32]) -> f64 {
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    for &l in labels {
        *counts.entry(l).or_default() += 1;
    }
    counts.values().copied().max().unwrap_or(0) as f64 / labels.len().max(1) as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvFold {
    pub repeat: usize,
    pub fold: usize,
    pub report: EvalReport,
    /// Majority class of the training half, scored on the held-out half.
    pub baseline_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvSummary {
    pub folds: Vec<CvFold>,
}

impl CvSummary {
    pub fn mean_accuracy(&self) -> f64 {
        self.mean(|f| f.report.accuracy)
    }

    pub fn mean_f1(&self) -> f64 {
        self.mean(|f| f.report.f1)
    }

    pub fn mean_baseline(&self) -> f64 {
        self.mean(|f| f.baseline_accuracy)
    }

    fn mean(&self, get: impl Fn(&CvFold) -> f64) -> f64 {
        self.folds.iter().map(get).sum::<f64>() / self.folds.len().max(1) as f64
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("repeat\tfold\taccuracy\tf1\tbaseline\n");
        for f in &self.folds {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                f.repeat, f.fold, f.report.accuracy, f.report.f1, f.baseline_accuracy
            ));
        }
        out
    }
}

/// Repeated k-fold evaluation of the whole training procedure: each outer
/// fold trains a full ensemble on the rest of the corpus. Repeat `r` splits
/// with seed `config.seed + r`.
pub fn cross_validate(
    corpus: &LabeledCorpus,
    resources: &ResourceBundle,
    tagger: &PosTaggerModel,
    config: &EnsembleConfig,
    repeats: usize,
    k: usize,
) -> Result<CvSummary> {
    if k < 2 || repeats == 0 {
        return Err(IronyError::Config(
            "cross-validation needs k >= 2 and at least one repeat".into(),
        ));
    }
    let prepared: Vec<TokenizedTweet> = prepare_tweets(&corpus.tweets, resources, tagger, None)?;
    let labels = corpus.labels();
    let mut folds = Vec::new();
    for repeat in 0..repeats {
        let assign = split_folds(&labels, k, config.seed.wrapping_add(repeat as u64))?;
        for fold in 0..k {
            let (test, train): (Vec<usize>, Vec<usize>) =
                (0..labels.len()).partition(|&i| assign[i] == fold);
            let sub = corpus.subset(&train);
            let sub_prepared: Vec<TokenizedTweet> =
                train.iter().map(|&i| prepared[i].clone()).collect();
            let model = train_ensemble(
                &sub,
                &sub_prepared,
                resources.clone(),
                tagger.clone(),
                config,
                &[],
            )
            .map_err(|e| e.in_fold(fold))?;
            let test_prepared: Vec<TokenizedTweet> =
                test.iter().map(|&i| prepared[i].clone()).collect();
            let preds = model.predict_tokenized(&test_prepared)?;
            let gold: Vec<u32> = test.iter().map(|&i| labels[i]).collect();
            let predicted: Vec<u32> = preds.iter().map(|p| p.label).collect();
            let report = evaluate(&gold, &predicted, corpus.task)?;

            let train_labels = sub.labels();
            let majority = (0..corpus.task.num_classes() as u32)
                .max_by_key(|&c| {
                    (
                        train_labels.iter().filter(|&&l| l == c).count(),
                        std::cmp::Reverse(c),
                    )
                })
                .unwrap_or(0);
            let baseline_accuracy =
                gold.iter().filter(|&&g| g == majority).count() as f64 / gold.len() as f64;
            log::info!(
                "cv repeat {repeat} fold {fold}: accuracy {:.4} (baseline {:.4})",
                report.accuracy,
                baseline_accuracy
            );
            folds.push(CvFold {
                repeat,
                fold,
                report,
                baseline_accuracy,
            });
        }
    }
    Ok(CvSummary { folds })
}
