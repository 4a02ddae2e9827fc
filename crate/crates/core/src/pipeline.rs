//! Fitting every extractor on a training corpus and mapping tweets to fixed
//! width feature vectors.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::brown::{collect_bigram_stats, train_brown, BrownClustering};
use crate::corpus::RawTweet;
use crate::error::{IronyError, Result};
use crate::lsi::{LsiModel, SvdMethod};
use crate::ngram::{surface_counts, NgramLevel, NgramVocabulary, PosVocabulary, SparseBlock};
use crate::normalize::Normalizer;
use crate::polarity::{polarity_block, POLARITY_WIDTH};
use crate::resources::ResourceBundle;
use crate::semantic::semantic_block;
use crate::tagger::{tag_index, PosTaggerModel, TAGSET};
use crate::tokenize::{tokenize, TokenizedTweet};

/// Standard deviations below this zero the column.
pub const STD_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    Lexical,
    Syntactic,
    Semantic,
    Polarity,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::Lexical,
        Family::Syntactic,
        Family::Semantic,
        Family::Polarity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Lexical => "lexical",
            Family::Syntactic => "syntactic",
            Family::Semantic => "semantic",
            Family::Polarity => "polarity",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureToggles {
    pub lexical: bool,
    pub syntactic: bool,
    pub semantic: bool,
    pub polarity: bool,
}

impl Default for FeatureToggles {
    fn default() -> Self {
        FeatureToggles {
            lexical: true,
            syntactic: true,
            semantic: true,
            polarity: true,
        }
    }
}

impl FeatureToggles {
    pub fn enabled(&self, f: Family) -> bool {
        match f {
            Family::Lexical => self.lexical,
            Family::Syntactic => self.syntactic,
            Family::Semantic => self.semantic,
            Family::Polarity => self.polarity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub toggles: FeatureToggles,
    pub ngram_top_k: usize,
    pub lsi_rank: usize,
    pub brown_clusters: Vec<usize>,
    pub brown_min_count: u64,
    pub svd: SvdMethod,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            toggles: FeatureToggles::default(),
            ngram_top_k: 1000,
            lsi_rank: crate::lsi::DEFAULT_RANK,
            brown_clusters: vec![80, 100, 120],
            brown_min_count: 1,
            svd: SvdMethod::Randomized { seed: 0 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSpec {
    pub name: String,
    pub family: Family,
    pub offset: usize,
    pub width: usize,
    /// Standardized with training statistics.
    pub dense: bool,
}

/// Per-column standardization for the dense blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseScaler {
    pub columns: Vec<usize>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl DenseScaler {
    pub fn fit(raw: &Array2<f64>, columns: Vec<usize>) -> Self {
        let n = raw.nrows().max(1) as f64;
        let mut mean = Vec::with_capacity(columns.len());
        let mut std = Vec::with_capacity(columns.len());
        for &c in &columns {
            let col = raw.column(c);
            let m = col.sum() / n;
            let var = col.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n;
            mean.push(m);
            std.push(var.sqrt());
        }
        DenseScaler { columns, mean, std }
    }

    pub fn apply(&self, row: &mut [f64]) {
        for ((&c, &m), &s) in self.columns.iter().zip(&self.mean).zip(&self.std) {
            row[c] = if s < STD_FLOOR { 0.0 } else { (row[c] - m) / s };
        }
    }
}

/// Normalizes, tokenizes and tags raw tweets. `sidecar` tags replace the
/// tagger's output and must match the token count.
pub fn prepare_tweets(
    tweets: &[RawTweet],
    resources: &ResourceBundle,
    tagger: &PosTaggerModel,
    sidecar: Option<&BTreeMap<u64, Vec<String>>>,
) -> Result<Vec<TokenizedTweet>> {
    let normalizer = Normalizer::new(resources);
    tweets
        .par_iter()
        .map(|raw| {
            let text = normalizer.normalize(raw).text;
            let tokens = tokenize(&text);
            let tags = match sidecar.and_then(|s| s.get(&raw.id)) {
                Some(tags) if tags.len() == tokens.len() => tags.clone(),
                Some(tags) => {
                    return Err(IronyError::Validation(format!(
                        "tweet {}: sidecar has {} tags for {} tokens",
                        raw.id,
                        tags.len(),
                        tokens.len()
                    )))
                }
                None => tagger
                    .tag(&tokens)
                    .into_iter()
                    .map(str::to_string)
                    .collect(),
            };
            Ok(TokenizedTweet {
                id: raw.id,
                text,
                tokens,
                tags,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeaturePipeline {
    pub config: PipelineConfig,
    pub word_vocab: Option<NgramVocabulary>,
    pub char_vocab: Option<NgramVocabulary>,
    pub pos_vocab: Option<PosVocabulary>,
    pub lsi: Option<LsiModel>,
    pub clusterings: Vec<BrownClustering>,
    pub resources: ResourceBundle,
    pub tagger: PosTaggerModel,
    pub layout: Vec<BlockSpec>,
    pub scaler: DenseScaler,
}

struct LayoutBuilder(Vec<BlockSpec>);

impl LayoutBuilder {
    fn push(&mut self, name: &str, family: Family, width: usize, dense: bool) {
        let offset = self.0.last().map_or(0, |b| b.offset + b.width);
        self.0.push(BlockSpec {
            name: name.to_string(),
            family,
            offset,
            width,
            dense,
        });
    }
}

impl FeaturePipeline {
    /// Fits on `train` only. `extra_brown` adds unlabeled token sequences to
    /// the Brown clustering input.
    pub fn fit(
        train: &[TokenizedTweet],
        resources: ResourceBundle,
        tagger: PosTaggerModel,
        config: PipelineConfig,
        extra_brown: &[Vec<String>],
    ) -> Result<Self> {
        if train.is_empty() {
            return Err(IronyError::Validation(
                "cannot fit features on an empty corpus".into(),
            ));
        }
        let t = config.toggles;
        let mut layout = LayoutBuilder(Vec::new());
        let (mut word_vocab, mut char_vocab, mut pos_vocab, mut lsi) = (None, None, None, None);
        let mut clusterings = Vec::new();

        if t.lexical {
            let fit = |level| {
                NgramVocabulary::fit(train, level, config.ngram_top_k)
                    .map_err(|e| e.in_block("lexical"))
            };
            let w = fit(NgramLevel::Word)?;
            let c = fit(NgramLevel::Char)?;
            layout.push("word_ngrams", Family::Lexical, w.len(), false);
            layout.push("char_ngrams", Family::Lexical, c.len(), false);
            layout.push("surface", Family::Lexical, 2, true);
            word_vocab = Some(w);
            char_vocab = Some(c);
        }
        if t.syntactic {
            let p = PosVocabulary::fit(train);
            layout.push("pos", Family::Syntactic, p.len(), false);
            pos_vocab = Some(p);
        }
        if t.semantic {
            layout.push(
                "embedding",
                Family::Semantic,
                resources.embeddings.dim(),
                true,
            );
            let rank = config.lsi_rank.min(LsiModel::achievable_rank(train));
            let model = if rank == 0 {
                LsiModel::empty(0)
            } else {
                LsiModel::fit(train, rank, config.svd).map_err(|e| e.in_block("semantic"))?
            };
            if rank < config.lsi_rank {
                log::warn!(
                    "LSI rank reduced to {rank} (corpus supports no more); padding to {}",
                    config.lsi_rank
                );
            }
            lsi = Some(model);
            layout.push("lsi", Family::Semantic, config.lsi_rank, true);

            let sentences: Vec<&[String]> = train
                .iter()
                .map(|t| t.tokens.as_slice())
                .chain(extra_brown.iter().map(Vec::as_slice))
                .collect();
            let stats = collect_bigram_stats(sentences.iter().copied(), config.brown_min_count)
                .map_err(|e| e.in_block("semantic"))?;
            clusterings = config
                .brown_clusters
                .par_iter()
                .map(|&c| train_brown(&stats, c).map_err(|e| e.in_block("semantic")))
                .collect::<Result<Vec<_>>>()?;
            for c in &clusterings {
                layout.push(
                    &format!("brown_{}", c.num_clusters),
                    Family::Semantic,
                    c.num_clusters,
                    true,
                );
            }
        }
        if t.polarity {
            layout.push("polarity", Family::Polarity, POLARITY_WIDTH, true);
        }

        let mut pipeline = FeaturePipeline {
            config,
            word_vocab,
            char_vocab,
            pos_vocab,
            lsi,
            clusterings,
            resources,
            tagger,
            layout: layout.0,
            scaler: DenseScaler {
                columns: Vec::new(),
                mean: Vec::new(),
                std: Vec::new(),
            },
        };
        let raw = pipeline.raw_matrix(train)?;
        let dense_cols = pipeline
            .layout
            .iter()
            .filter(|b| b.dense)
            .flat_map(|b| b.offset..b.offset + b.width)
            .collect();
        pipeline.scaler = DenseScaler::fit(&raw, dense_cols);
        Ok(pipeline)
    }

    pub fn width(&self) -> usize {
        self.layout.last().map_or(0, |b| b.offset + b.width)
    }

    pub fn family_width(&self, f: Family) -> usize {
        self.layout
            .iter()
            .filter(|b| b.family == f)
            .map(|b| b.width)
            .sum()
    }

    pub fn block(&self, name: &str) -> Option<&BlockSpec> {
        self.layout.iter().find(|b| b.name == name)
    }

    /// Unscaled feature row.
    pub fn raw_features(&self, tweet: &TokenizedTweet) -> Result<Vec<f64>> {
        let mut row = vec![0.0; self.width()];
        let put_sparse = |row: &mut Vec<f64>, offset: usize, block: SparseBlock| {
            for (c, v) in block {
                row[offset + c as usize] = v;
            }
        };
        for b in &self.layout {
            match b.name.as_str() {
                "word_ngrams" => put_sparse(
                    &mut row,
                    b.offset,
                    self.word_vocab
                        .as_ref()
                        .expect("word vocabulary")
                        .vectorize(tweet),
                ),
                "char_ngrams" => put_sparse(
                    &mut row,
                    b.offset,
                    self.char_vocab
                        .as_ref()
                        .expect("char vocabulary")
                        .vectorize(tweet),
                ),
                "surface" => row[b.offset..b.offset + 2].copy_from_slice(&surface_counts(tweet)),
                "pos" => put_sparse(
                    &mut row,
                    b.offset,
                    self.pos_vocab
                        .as_ref()
                        .expect("POS vocabulary")
                        .vectorize(tweet),
                ),
                "embedding" => {
                    let block = semantic_block(
                        &tweet.tokens,
                        &self.resources.embeddings,
                        self.lsi.as_ref().expect("LSI model"),
                        self.config.lsi_rank,
                        &self.clusterings,
                    )
                    .map_err(|e| e.in_block("semantic"))?;
                    row[b.offset..b.offset + block.len()].copy_from_slice(&block);
                }
                "polarity" => row[b.offset..b.offset + POLARITY_WIDTH]
                    .copy_from_slice(&polarity_block(&tweet.tokens, &self.resources)),
                _ => {}
            }
        }
        if let Some(i) = row.iter().position(|v| !v.is_finite()) {
            return Err(IronyError::Internal(format!(
                "tweet {}: non-finite feature at column {i}",
                tweet.id
            )));
        }
        Ok(row)
    }

    fn raw_matrix(&self, tweets: &[TokenizedTweet]) -> Result<Array2<f64>> {
        let rows: Vec<Vec<f64>> = tweets
            .par_iter()
            .map(|t| self.raw_features(t))
            .collect::<Result<_>>()?;
        let w = self.width();
        Array2::from_shape_vec((rows.len(), w), rows.concat())
            .map_err(|e| IronyError::Internal(e.to_string()))
    }

    pub fn transform_tokenized(&self, tweet: &TokenizedTweet) -> Result<Vec<f64>> {
        let mut row = self.raw_features(tweet)?;
        self.scaler.apply(&mut row);
        Ok(row)
    }

    /// Scaled feature matrix, one row per tweet.
    pub fn transform_batch(&self, tweets: &[TokenizedTweet]) -> Result<Array2<f64>> {
        let mut m = self.raw_matrix(tweets)?;
        for mut row in m.rows_mut() {
            self.scaler
                .apply(row.as_slice_mut().expect("contiguous row"));
        }
        Ok(m)
    }

    pub fn prepare(
        &self,
        tweets: &[RawTweet],
        sidecar: Option<&BTreeMap<u64, Vec<String>>>,
    ) -> Result<Vec<TokenizedTweet>> {
        prepare_tweets(tweets, &self.resources, &self.tagger, sidecar)
    }

    /// Full path from raw text to a scaled feature vector.
    pub fn transform(&self, tweet: &RawTweet) -> Result<Vec<f64>> {
        let prepared = self.prepare(std::slice::from_ref(tweet), None)?;
        self.transform_tokenized(&prepared[0])
    }

    /// Layout header (`# name family offset width`) then `id` and values per
    /// row, tab-separated.
    pub fn export_matrix(
        &self,
        path: impl AsRef<Path>,
        ids: &[u64],
        matrix: &Array2<f64>,
    ) -> Result<()> {
        let path = path.as_ref();
        let mut out = String::new();
        for b in &self.layout {
            let _ = writeln!(
                out,
                "# {}\t{}\t{}\t{}",
                b.name,
                b.family.name(),
                b.offset,
                b.width
            );
        }
        for (id, row) in ids.iter().zip(matrix.rows()) {
            let _ = write!(out, "{id}");
            for v in row {
                let _ = write!(out, "\t{v}");
            }
            out.push('\n');
        }
        fs::write(path, out).map_err(|e| IronyError::io(path, e))
    }
}

/// Every tag a tweet carries must be in the tagset.
pub fn check_tags(tweets: &[TokenizedTweet]) -> Result<()> {
    for t in tweets {
        if let Some(bad) = t.tags.iter().find(|g| tag_index(g).is_none()) {
            return Err(IronyError::Validation(format!(
                "tweet {}: tag `{bad}` is not one of the {} tagset symbols",
                t.id,
                TAGSET.len()
            )));
        }
    }
    Ok(())
}
