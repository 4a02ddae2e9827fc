//! The semantic block: averaged word embedding, LSI fold-in and Brown
//! cluster counts, concatenated in that order.

use crate::brown::{cluster_count_block, BrownClustering};
use crate::error::{IronyError, Result};
use crate::lsi::LsiModel;
use crate::resources::EmbeddingTable;

/// Mean embedding of the tokens found in `table`; zero when none are.
pub fn average_embedding(tokens: &[String], table: &EmbeddingTable) -> Vec<f64> {
    let mut sum = vec![0.0; table.dim()];
    let mut found = 0usize;
    for t in tokens {
        if let Some(v) = table.get(t) {
            for (s, x) in sum.iter_mut().zip(v) {
                *s += x;
            }
            found += 1;
        }
    }
    if found > 0 {
        for s in sum.iter_mut() {
            *s /= found as f64;
        }
    }
    sum
}

pub fn semantic_width(
    table: &EmbeddingTable,
    lsi_width: usize,
    clusterings: &[BrownClustering],
) -> usize {
    table.dim() + lsi_width + clusterings.iter().map(|c| c.num_clusters).sum::<usize>()
}

/// `[embedding | lsi | cluster counts]`. The LSI part is zero-padded to
/// `lsi_width` when the fitted rank is smaller.
pub fn semantic_block(
    tokens: &[String],
    table: &EmbeddingTable,
    lsi: &LsiModel,
    lsi_width: usize,
    clusterings: &[BrownClustering],
) -> Result<Vec<f64>> {
    if lsi.k > lsi_width {
        return Err(IronyError::Internal(format!(
            "LSI rank {} exceeds its block width {lsi_width}",
            lsi.k
        )));
    }
    let mut block = average_embedding(tokens, table);
    let mut proj = lsi.project(tokens);
    proj.resize(lsi_width, 0.0);
    block.extend(proj);
    block.extend(cluster_count_block(tokens, clusterings));
    let want = semantic_width(table, lsi_width, clusterings);
    if block.len() != want {
        return Err(IronyError::Internal(format!(
            "semantic block has width {}, expected {want}",
            block.len()
        )));
    }
    Ok(block)
}
