use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;

use crate::error::{Error, Result};
use crate::matrix::{MatrixLike, SparseMatrix};
use crate::numeric::{self, ceil_count};
use crate::rng::{stage, Seed};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Per-row sample count `ceil(c · ε⁻² · ns · ln(m + n))`.
pub fn l1_row_budget(ns: f64, rows: usize, cols: usize, eps: f64, c_l1: f64) -> usize {
    ceil_count(c_l1 * ns * ((rows + cols) as f64).ln() / (eps * eps))
}

/// Draws `s_per_row` entries with replacement from each row's ℓ1
/// distribution `|A_ij| / ‖A_i‖₁` and averages the rescaled draws
/// `(A_ij / p_ij) e_jᵀ`. Repeated draws of one coordinate are summed, so no
/// row ends up with more than `s_per_row` nonzeros. Zero rows stay zero.
pub fn sparsify_l1_rows<M: MatrixLike>(a: &M, s_per_row: usize, seed: u64) -> Result<SparseMatrix> {
    if s_per_row == 0 {
        return Err(Error::InvalidArgument("s_per_row must be at least 1".into()));
    }
    let sparse = a.to_sparse();
    let root = Seed::new(seed).derive(stage::L1_ROWS);
    let sample_row = |i: usize| -> Vec<(usize, usize, f64)> {
        let row = sparse.row_entries(i);
        if row.is_empty() {
            return Vec::new();
        }
        let l1 = numeric::sum(row.iter().map(|e| e.2.abs()));
        let mut hits = vec![0usize; row.len()];
        if row.len() == 1 {
            hits[0] = s_per_row;
        } else {
            let dist = WeightedIndex::new(row.iter().map(|e| e.2.abs())).expect("row weights are positive and finite");
            let mut rng = root.derive(i as u64).rng();
            for _ in 0..s_per_row {
                hits[dist.sample(&mut rng)] += 1;
            }
        }
        row.iter()
            .zip(hits)
            .filter(|(_, h)| *h > 0)
            .map(|(&(i, j, v), h)| (i, j, v.signum() * l1 * (h as f64 / s_per_row as f64)))
            .collect()
    };
    #[cfg(feature = "parallel")]
    let rows: Vec<_> = (0..sparse.rows()).into_par_iter().map(sample_row).collect();
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<_> = (0..sparse.rows()).map(sample_row).collect();
    Ok(SparseMatrix::from_sorted_unchecked(sparse.rows(), sparse.cols(), rows.into_iter().flatten().collect()))
}
