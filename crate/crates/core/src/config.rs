//! Run configuration: a TOML file plus command-line overrides.
//!
//! ```toml
//! task = "A"
//! seed = 0
//! jobs = 1
//! folds = 10
//!
//! [paths]
//! train = "data/train-A.txt"
//! resources = "data"
//! embeddings = "glove.twitter.27B.300d.txt"
//! embedding_dim = 300
//!
//! [mlp]
//! hidden = [800, 400]
//! learning_rate = 1e-4
//! l2 = 1e-5
//! max_epochs = 100
//! patience = 30
//! batch_size = 32
//!
//! [features]
//! lexical = true
//! syntactic = true
//! semantic = true
//! polarity = true
//! ngram_top_k = 1000
//! lsi_rank = 100
//! brown_clusters = [80, 100, 120]
//! brown_min_count = 1
//! svd = "randomized"   # or "dense"
//! ```
//!
//! Every key is optional; missing keys take the per-task defaults. Relative
//! paths are resolved against the directory holding the file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::Task;
use crate::ensemble::EnsembleConfig;
use crate::error::{IronyError, Result};
use crate::lsi::SvdMethod;
use crate::resources::DEFAULT_EMBEDDING_DIM;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathsSection {
    pub train: Option<PathBuf>,
    pub test: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub resources: Option<PathBuf>,
    pub tagger: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub embedding_dim: Option<usize>,
    /// Pre-tagged `id \t tag tag ...` file for the training tweets.
    pub tags: Option<PathBuf>,
    /// Extra tokenized sentences for Brown clustering, one per line.
    pub brown_corpus: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MlpSection {
    pub hidden: Option<[usize; 2]>,
    pub learning_rate: Option<f64>,
    pub l2: Option<f64>,
    pub max_epochs: Option<usize>,
    pub patience: Option<usize>,
    pub batch_size: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeaturesSection {
    pub lexical: Option<bool>,
    pub syntactic: Option<bool>,
    pub semantic: Option<bool>,
    pub polarity: Option<bool>,
    pub ngram_top_k: Option<usize>,
    pub lsi_rank: Option<usize>,
    pub brown_clusters: Option<Vec<usize>>,
    pub brown_min_count: Option<u64>,
    pub svd: Option<String>,
}

/// Partially specified configuration, as read from a file or built from
/// flags. [`ConfigFile::overlay`] lets the later source win key by key.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub task: Option<Task>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub folds: Option<usize>,
    #[serde(default)]
    pub paths: PathsSection,
    #[serde(default)]
    pub mlp: MlpSection,
    #[serde(default)]
    pub features: FeaturesSection,
}

macro_rules! overlay_fields {
    ($base:expr, $top:expr; $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f; } )*
    };
}

impl ConfigFile {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut cfg: ConfigFile = toml::from_str(text)
            .map_err(|e| IronyError::Config(format!("{}: {}", path.display(), e.message())))?;
        if let Some(dir) = path.parent() {
            cfg.paths.rebase(dir);
        }
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| IronyError::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn overlay(mut self, top: ConfigFile) -> Self {
        overlay_fields!(self, top; task, seed, jobs, folds);
        overlay_fields!(self.paths, top.paths;
            train, test, model, resources, tagger, embeddings, embedding_dim, tags, brown_corpus);
        overlay_fields!(self.mlp, top.mlp;
            hidden, learning_rate, l2, max_epochs, patience, batch_size);
        overlay_fields!(self.features, top.features;
            lexical, syntactic, semantic, polarity, ngram_top_k, lsi_rank,
            brown_clusters, brown_min_count, svd);
        self
    }

    /// Fills defaults. `fallback_task` is used when neither source names one.
    pub fn resolve(self, fallback_task: Option<Task>) -> Result<RunConfig> {
        let task = self.task.or(fallback_task).ok_or_else(|| {
            IronyError::Config("no task given (set `task` or pass --task)".into())
        })?;
        let mut ensemble = EnsembleConfig::for_task(task);
        if let Some(seed) = self.seed {
            ensemble.seed = seed;
        }
        if let Some(jobs) = self.jobs {
            ensemble.jobs = jobs;
        }
        if let Some(folds) = self.folds {
            ensemble.folds = folds;
        }

        let m = &mut ensemble.mlp;
        if let Some([h1, h2]) = self.mlp.hidden {
            m.hidden = (h1, h2);
        }
        overlay_scalar(&mut m.learning_rate, self.mlp.learning_rate);
        overlay_scalar(&mut m.l2, self.mlp.l2);
        overlay_scalar(&mut m.max_epochs, self.mlp.max_epochs);
        overlay_scalar(&mut m.patience, self.mlp.patience);
        overlay_scalar(&mut m.batch_size, self.mlp.batch_size);
        m.validate()?;

        let p = &mut ensemble.pipeline;
        let f = self.features;
        overlay_scalar(&mut p.toggles.lexical, f.lexical);
        overlay_scalar(&mut p.toggles.syntactic, f.syntactic);
        overlay_scalar(&mut p.toggles.semantic, f.semantic);
        overlay_scalar(&mut p.toggles.polarity, f.polarity);
        overlay_scalar(&mut p.ngram_top_k, f.ngram_top_k);
        overlay_scalar(&mut p.lsi_rank, f.lsi_rank);
        overlay_scalar(&mut p.brown_clusters, f.brown_clusters);
        overlay_scalar(&mut p.brown_min_count, f.brown_min_count);
        if let Some(svd) = f.svd {
            p.svd = parse_svd(&svd)?;
        }
        if p.brown_clusters.contains(&0) {
            return Err(IronyError::Config(
                "brown cluster counts must be positive".into(),
            ));
        }
        if ensemble.folds < 2 {
            return Err(IronyError::Config("folds must be at least 2".into()));
        }
        if ensemble.jobs == 0 {
            return Err(IronyError::Config("jobs must be at least 1".into()));
        }

        Ok(RunConfig {
            task,
            embedding_dim: self.paths.embedding_dim.unwrap_or(DEFAULT_EMBEDDING_DIM),
            paths: self.paths,
            ensemble,
        })
    }
}

fn overlay_scalar<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

pub fn parse_svd(s: &str) -> Result<SvdMethod> {
    match s.trim().to_ascii_lowercase().as_str() {
        "randomized" | "random" => Ok(SvdMethod::Randomized { seed: 0 }),
        "dense" | "exact" => Ok(SvdMethod::Dense),
        other => Err(IronyError::Config(format!(
            "unknown svd method `{other}` (expected randomized or dense)"
        ))),
    }
}

impl PathsSection {
    fn rebase(&mut self, dir: &Path) {
        for p in [
            &mut self.train,
            &mut self.test,
            &mut self.model,
            &mut self.resources,
            &mut self.tagger,
            &mut self.embeddings,
            &mut self.tags,
            &mut self.brown_corpus,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
    }
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub task: Task,
    pub paths: PathsSection,
    pub embedding_dim: usize,
    pub ensemble: EnsembleConfig,
}
