//! Ridge regression `min ‖Ax − b‖² + λ‖x‖²` preconditioned by a sparsifier.
//!
//! The normal equations `(AᵀA + λI) x = Aᵀb` are solved by preconditioned
//! CG where every preconditioner application is an inner CG solve with
//! `PᵀP + λI`, `P` a hybrid sparsifier of `A`.

pub mod cg;
pub mod diagnostics;
pub mod precond;

pub use cg::{cg_solve, pcg_solve, CgOutcome, PcgOutcome, StopRule};
pub use diagnostics::{
    check_sandwich_vectors, energy_gap_identity_check, expected_row_sparsity, row_norm_inflation_check,
    InflationReport, SandwichCheck,
};
pub use precond::{
    build_preconditioner, precond_quality, precond_ridge_solve, precond_ridge_solve_with, Preconditioner,
    RidgeSolveOptions, RidgeSolveOutcome,
};

use crate::error::{Error, Result};
use crate::matrix::{MatrixLike, SparseMatrix};
use crate::numeric;
use crate::oracle::{self, ORACLE_MAX_DIM};
use crate::power::{spectral_norm_estimate, PowerOptions};

#[derive(Debug, Clone)]
pub struct RidgeProblem {
    pub a: SparseMatrix,
    /// Targets, length `m`.
    pub b: Vec<f64>,
    pub lambda: f64,
    /// Starting point, length `n`.
    pub x0: Vec<f64>,
    /// Power-method estimate of `‖A‖₂`.
    pub sigma: f64,
    /// `κ_λ = ‖A‖₂² / λ`.
    pub kappa: f64,
}

impl RidgeProblem {
    /// `x0` defaults to the zero vector.
    pub fn new<M: MatrixLike>(a: &M, b: Vec<f64>, lambda: f64, x0: Option<Vec<f64>>) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("lambda must be > 0, got {lambda}")));
        }
        if b.len() != a.rows() {
            return Err(Error::Shape(format!("b has length {}, A has {} rows", b.len(), a.rows())));
        }
        let x0 = x0.unwrap_or_else(|| vec![0.0; a.cols()]);
        if x0.len() != a.cols() {
            return Err(Error::Shape(format!("x0 has length {}, A has {} columns", x0.len(), a.cols())));
        }
        if b.iter().chain(&x0).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("ridge vectors".into()));
        }
        let sigma = spectral_norm_estimate(a, PowerOptions::default(), 0)?.sigma;
        Ok(Self { a: a.to_sparse(), b, lambda, x0, sigma, kappa: sigma * sigma / lambda })
    }

    pub fn dim(&self) -> usize {
        self.a.cols()
    }

    /// `Aᵀb`.
    pub fn rhs(&self) -> Vec<f64> {
        self.a.tr_mul_vec(&self.b)
    }

    /// `y = (AᵀA + λI) x`.
    pub fn apply_normal(&self, x: &[f64], y: &mut [f64]) {
        apply_shifted_gram(&self.a, self.lambda, x, y);
    }

    /// `(x − y)ᵀ (AᵀA + λI) (x − y)`.
    pub fn energy_distance(&self, x: &[f64], y: &[f64]) -> f64 {
        let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        let ad = self.a.mul_vec(&d);
        numeric::dot(&ad, &ad) + self.lambda * numeric::dot(&d, &d)
    }
}

/// `y = (MᵀM + λI) x` without forming the Gram matrix.
pub fn apply_shifted_gram<M: MatrixLike>(m: &M, lambda: f64, x: &[f64], y: &mut [f64]) {
    let mx = m.mul_vec(x);
    m.tr_mul_vec_into(&mx, y);
    numeric::axpy(lambda, x, y);
}

/// `x* = (AᵀA + λI)⁻¹ Aᵀb` by a dense Cholesky solve; `n ≤ 512`.
pub fn ridge_exact(prob: &RidgeProblem) -> Result<Vec<f64>> {
    if prob.a.rows().max(prob.a.cols()) > ORACLE_MAX_DIM {
        return Err(Error::OracleScale(format!("ridge_exact supports dimensions up to {ORACLE_MAX_DIM}")));
    }
    let g = oracle::gram_shifted(&prob.a, prob.lambda)?;
    oracle::solve_spd(g, &prob.rhs())
}
