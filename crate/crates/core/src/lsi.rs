//! Latent semantic indexing over word unigrams: a tf-idf term–document
//! matrix, its truncated SVD, and query fold-in for unseen tweets.

use std::collections::{BTreeMap, HashMap};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{IronyError, Result};
use crate::linalg::{fix_signs, left_svd_dense, randomized_left_svd, CscMatrix};
use crate::ngram::idf;
use crate::tokenize::TokenizedTweet;

pub const DEFAULT_RANK: usize = 100;
pub const MIN_DF: usize = 2;
pub const OVERSAMPLE: usize = 10;
pub const POWER_ITERS: usize = 4;
/// Singular values below this project to 0.
pub const SIGMA_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SvdMethod {
    Randomized {
        seed: u64,
    },
    /// Slow exact path, for tests and small corpora.
    Dense,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LsiModel {
    pub term_index: BTreeMap<String, u32>,
    pub idf: Vec<f64>,
    /// Row-major `terms × k`.
    pub u: Vec<f64>,
    pub sigma: Vec<f64>,
    pub k: usize,
}

struct TermSpace {
    term_index: BTreeMap<String, u32>,
    idf: Vec<f64>,
}

fn term_space(corpus: &[TokenizedTweet]) -> TermSpace {
    let mut df: HashMap<&str, usize> = HashMap::new();
    for t in corpus {
        let mut seen: Vec<&str> = t.tokens.iter().map(String::as_str).collect();
        seen.sort_unstable();
        seen.dedup();
        for w in seen {
            *df.entry(w).or_insert(0) += 1;
        }
    }
    let mut terms: Vec<(&str, usize)> = df.into_iter().filter(|&(_, d)| d >= MIN_DF).collect();
    terms.sort_unstable();
    TermSpace {
        term_index: terms
            .iter()
            .enumerate()
            .map(|(i, (w, _))| (w.to_string(), i as u32))
            .collect(),
        idf: terms.iter().map(|&(_, d)| idf(corpus.len(), d)).collect(),
    }
}

fn raw_vector(tokens: &[String], index: &BTreeMap<String, u32>, idf: &[f64]) -> Vec<(usize, f64)> {
    let mut tf: BTreeMap<usize, f64> = BTreeMap::new();
    for t in tokens {
        if let Some(&r) = index.get(t) {
            *tf.entry(r as usize).or_insert(0.0) += 1.0;
        }
    }
    tf.into_iter().map(|(r, c)| (r, c * idf[r])).collect()
}

fn normalized(mut v: Vec<(usize, f64)>) -> Vec<(usize, f64)> {
    let n = v.iter().map(|(_, x)| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        for (_, x) in v.iter_mut() {
            *x /= n;
        }
    }
    v
}

/// The L2-normalized tf-idf term–document matrix and its term space.
pub fn term_document_matrix(
    corpus: &[TokenizedTweet],
) -> (CscMatrix, BTreeMap<String, u32>, Vec<f64>) {
    let space = term_space(corpus);
    let columns: Vec<Vec<(usize, f64)>> = corpus
        .iter()
        .map(|t| normalized(raw_vector(&t.tokens, &space.term_index, &space.idf)))
        .collect();
    let a = CscMatrix::from_columns(space.idf.len(), &columns);
    (a, space.term_index, space.idf)
}

impl LsiModel {
    /// Largest rank the corpus supports.
    pub fn achievable_rank(corpus: &[TokenizedTweet]) -> usize {
        term_space(corpus).idf.len().min(corpus.len())
    }

    pub fn fit(corpus: &[TokenizedTweet], k: usize, method: SvdMethod) -> Result<Self> {
        if k == 0 {
            return Err(IronyError::Config("LSI rank must be positive".into()));
        }
        if corpus.is_empty() {
            return Err(IronyError::Validation(
                "cannot fit LSI on an empty corpus".into(),
            ));
        }
        let (a, term_index, idf) = term_document_matrix(corpus);
        let max = a.nrows.min(a.ncols);
        if k > max {
            return Err(IronyError::Config(format!(
                "LSI rank {k} exceeds the achievable maximum {max} \
                 ({} terms with df >= {MIN_DF}, {} documents)",
                a.nrows, a.ncols
            )));
        }
        let (mut u, sigma) = match method {
            SvdMethod::Randomized { seed } => {
                randomized_left_svd(&a, k, OVERSAMPLE, POWER_ITERS, seed)
            }
            SvdMethod::Dense => {
                let (u, s) = left_svd_dense(&a.to_dense());
                (u.slice(ndarray::s![.., ..k]).to_owned(), s[..k].to_vec())
            }
        };
        fix_signs(&mut u);
        Ok(LsiModel {
            term_index,
            idf,
            u: u.iter().copied().collect(),
            sigma,
            k,
        })
    }

    /// Model with no terms; every projection is the zero vector.
    pub fn empty(k: usize) -> Self {
        LsiModel {
            term_index: BTreeMap::new(),
            idf: Vec::new(),
            u: Vec::new(),
            sigma: vec![0.0; k],
            k,
        }
    }

    pub fn num_terms(&self) -> usize {
        self.idf.len()
    }

    pub fn u_matrix(&self) -> Array2<f64> {
        Array2::from_shape_vec((self.num_terms(), self.k), self.u.clone()).expect("LSI basis shape")
    }

    /// Unnormalized tf-idf term vector of a token list.
    pub fn term_vector(&self, tokens: &[String]) -> Vec<(usize, f64)> {
        raw_vector(tokens, &self.term_index, &self.idf)
    }

    /// `Σ⁻¹ Uᵀ q` for a term-space vector `q`.
    pub fn project_vector(&self, q: &[(usize, f64)]) -> Vec<f64> {
        let mut out = vec![0.0; self.k];
        for &(r, x) in q {
            let row = &self.u[r * self.k..(r + 1) * self.k];
            for (o, &u) in out.iter_mut().zip(row) {
                *o += u * x;
            }
        }
        for (o, &s) in out.iter_mut().zip(&self.sigma) {
            *o = if s < SIGMA_FLOOR { 0.0 } else { *o / s };
        }
        out
    }

    /// Fold-in of a tweet's L2-normalized tf-idf vector.
    pub fn project(&self, tokens: &[String]) -> Vec<f64> {
        self.project_vector(&normalized(self.term_vector(tokens)))
    }
}
