//! Irony detection in English tweets.
//!
//! A tweet is normalized, tokenized and POS-tagged, then mapped to a fixed
//! feature vector made of four families (lexical n-gram tf-idf plus surface
//! counts, POS tf-idf, semantic embeddings/LSI/Brown-cluster counts, and
//! polarity signals). Ten two-hidden-layer ReLU networks, each trained with a
//! different cross-validation fold held out for early stopping, vote on the
//! final label.

pub mod brown;
pub mod config;
pub mod corpus;
pub mod ensemble;
pub mod error;
pub mod linalg;
pub mod lsi;
pub mod metrics;
pub mod mlp;
pub mod ngram;
pub mod normalize;
pub mod persist;
pub mod pipeline;
pub mod polarity;
pub mod resources;
pub mod semantic;
pub mod tagger;
pub mod tokenize;
pub mod workflow;

pub use error::{IronyError, Result};
