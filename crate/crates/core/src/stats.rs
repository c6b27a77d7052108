//! Numerical sparsity, stable rank and the cached matrix profile.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::MatrixLike;
use crate::numeric::{self, CompensatedSum};
use crate::power::{spectral_norm_estimate, PowerOptions};

/// `(‖v‖₁ / ‖v‖₂)²`, the smallest real `k ≥ 0` with `‖v‖₁ ≤ √k ‖v‖₂`.
/// Zero for the zero vector.
pub fn numerical_sparsity(v: &[f64]) -> Result<f64> {
    if let Some(p) = v.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite(format!("vector index {p}")));
    }
    let l1 = numeric::norm1(v);
    let l2sq = numeric::dot(v, v);
    Ok(ns_from_norms(l1, l2sq))
}

#[inline]
pub(crate) fn ns_from_norms(l1: f64, l2sq: f64) -> f64 {
    if l2sq == 0.0 {
        0.0
    } else {
        l1 * l1 / l2sq
    }
}

/// Row and column ℓ1 / ℓ2 norms gathered in one pass over the nonzeros.
#[derive(Debug, Clone, PartialEq)]
pub struct LineNorms {
    pub row_l1: Vec<f64>,
    pub row_l2: Vec<f64>,
    pub col_l1: Vec<f64>,
    pub col_l2: Vec<f64>,
    pub row_nnz: Vec<usize>,
    pub col_nnz: Vec<usize>,
    pub l1_total: f64,
    pub frob: f64,
}

impl LineNorms {
    pub fn of<M: MatrixLike>(a: &M) -> Self {
        let (m, n) = (a.rows(), a.cols());
        let mut r1 = vec![CompensatedSum::new(); m];
        let mut r2 = vec![CompensatedSum::new(); m];
        let mut c1 = vec![CompensatedSum::new(); n];
        let mut c2 = vec![CompensatedSum::new(); n];
        let mut row_nnz = vec![0; m];
        let mut col_nnz = vec![0; n];
        a.for_each_nonzero(|i, j, v| {
            r1[i].add(v.abs());
            r2[i].add(v * v);
            c1[j].add(v.abs());
            c2[j].add(v * v);
            row_nnz[i] += 1;
            col_nnz[j] += 1;
        });
        let row_l1: Vec<f64> = r1.iter().map(CompensatedSum::value).collect();
        let row_sq: Vec<f64> = r2.iter().map(CompensatedSum::value).collect();
        let col_l1: Vec<f64> = c1.iter().map(CompensatedSum::value).collect();
        let col_sq: Vec<f64> = c2.iter().map(CompensatedSum::value).collect();
        let l1_total = numeric::sum(row_l1.iter().copied());
        let frob = numeric::sum(row_sq.iter().copied()).sqrt();
        Self {
            row_l1,
            row_l2: row_sq.iter().map(|s| s.sqrt()).collect(),
            col_l1,
            col_l2: col_sq.iter().map(|s| s.sqrt()).collect(),
            row_nnz,
            col_nnz,
            l1_total,
            frob,
        }
    }

    /// Max numerical sparsity over all rows and columns; zero lines are skipped.
    pub fn ns(&self) -> f64 {
        let rows = self.row_l1.iter().zip(&self.row_l2);
        let cols = self.col_l1.iter().zip(&self.col_l2);
        rows.chain(cols).map(|(l1, l2)| ns_from_norms(*l1, l2 * l2)).fold(0.0, f64::max)
    }
}

/// Numerical sparsity of a matrix: the max over all of its rows and columns.
///
/// An all-zero matrix yields `0.0`, which can never occur for a nonzero
/// matrix (whose value is at least 1), so the zero doubles as the flag.
pub fn matrix_ns<M: MatrixLike>(a: &M) -> f64 {
    LineNorms::of(a).ns()
}

/// Cached statistics of a matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixProfile {
    pub rows: usize,
    pub cols: usize,
    pub nnz: usize,
    #[serde(skip)]
    pub row_l1: Vec<f64>,
    #[serde(skip)]
    pub row_l2: Vec<f64>,
    #[serde(skip)]
    pub col_l1: Vec<f64>,
    #[serde(skip)]
    pub col_l2: Vec<f64>,
    pub l1_total: f64,
    pub frob: f64,
    pub sigma: f64,
    pub sigma_converged: bool,
    pub ns: f64,
    /// `None` for the zero matrix.
    pub sr: Option<f64>,
    pub rsp: usize,
    pub csp: usize,
}

impl MatrixProfile {
    pub fn is_zero(&self) -> bool {
        self.nnz == 0
    }

    /// Larger and smaller dimension.
    pub fn dims_max_min(&self) -> (usize, usize) {
        (self.rows.max(self.cols), self.rows.min(self.cols))
    }
}

pub fn profile<M: MatrixLike>(a: &M, tol: f64, seed: u64) -> Result<MatrixProfile> {
    let est = spectral_norm_estimate(a, PowerOptions { tol, ..PowerOptions::default() }, seed)?;
    Ok(profile_with_sigma(a, est.sigma, est.converged))
}

/// Profile with an externally supplied spectral-norm value.
pub fn profile_with_sigma<M: MatrixLike>(a: &M, sigma: f64, sigma_converged: bool) -> MatrixProfile {
    let norms = LineNorms::of(a);
    let ns = norms.ns();
    let nnz = norms.row_nnz.iter().sum();
    let sr = (sigma > 0.0).then(|| norms.frob * norms.frob / (sigma * sigma));
    MatrixProfile {
        rows: a.rows(),
        cols: a.cols(),
        nnz,
        rsp: norms.row_nnz.iter().copied().max().unwrap_or(0),
        csp: norms.col_nnz.iter().copied().max().unwrap_or(0),
        l1_total: norms.l1_total,
        frob: norms.frob,
        sigma,
        sigma_converged,
        ns,
        sr,
        row_l1: norms.row_l1,
        row_l2: norms.row_l2,
        col_l1: norms.col_l1,
        col_l2: norms.col_l2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::DenseMatrix;

    #[test]
    fn vector_examples() {
        assert_eq!(numerical_sparsity(&[1.0, 1.0, 1.0, 1.0]).unwrap(), 4.0);
        assert_eq!(numerical_sparsity(&[0.0, 5.0, 0.0]).unwrap(), 1.0);
        // (3 + 4)² / (9 + 16)
        assert!((numerical_sparsity(&[3.0, 4.0]).unwrap() - 49.0 / 25.0).abs() < 1e-15);
        assert_eq!(numerical_sparsity(&[0.0, 0.0]).unwrap(), 0.0);
        assert!(numerical_sparsity(&[1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn matrix_examples() {
        assert_eq!(matrix_ns(&DenseMatrix::identity(4)), 1.0);
        let ones = DenseMatrix::from_fn(3, 3, |_, _| 1.0);
        assert!((matrix_ns(&ones) - 3.0).abs() < 1e-12);
        assert_eq!(matrix_ns(&DenseMatrix::zeros(3, 2)), 0.0);
    }

    #[test]
    fn identity_profile() {
        let p = profile(&DenseMatrix::identity(4), 1e-8, 1).unwrap();
        assert!((p.frob - 2.0).abs() < 1e-12);
        assert!((p.sigma - 1.0).abs() < 1e-7);
        assert!((p.sr.unwrap() - 4.0).abs() < 1e-6);
        assert_eq!(p.ns, 1.0);
        assert_eq!((p.rsp, p.csp, p.nnz), (1, 1, 4));
    }

    #[test]
    fn ones_profile_is_rank_one() {
        let p = profile(&DenseMatrix::from_fn(3, 3, |_, _| 1.0), 1e-8, 2).unwrap();
        assert!((p.frob - 3.0).abs() < 1e-12);
        assert!((p.sigma - 3.0).abs() < 1e-6);
        assert!((p.sr.unwrap() - 1.0).abs() < 1e-6);
        assert!((p.ns - 3.0).abs() < 1e-12);
    }

    #[test]
    fn zero_profile_is_flagged() {
        let p = profile(&DenseMatrix::zeros(2, 3), 1e-6, 0).unwrap();
        assert!(p.is_zero());
        assert_eq!(p.ns, 0.0);
        assert_eq!(p.sr, None);
    }
}
