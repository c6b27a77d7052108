//! Self-tests and Monte Carlo diagnostics for the ridge pipeline.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{MatrixLike, SparseMatrix};
use crate::numeric::{self, CompensatedSum};
use crate::oracle;
use crate::rng::{stage, Seed};

use super::{ridge_exact, RidgeProblem};

/// Both sides of `(x − x*)ᵀM(x − x*) = 2(f(x) − f(x*))` with `M = AᵀA + λI`
/// and `f(x) = ½xᵀMx − (Aᵀb)ᵀx`, evaluated independently.
pub fn energy_gap_identity_check<M: MatrixLike>(a: &M, lambda: f64, b: &[f64], x: &[f64]) -> Result<(f64, f64)> {
    let prob = RidgeProblem::new(a, b.to_vec(), lambda, None)?;
    if x.len() != prob.dim() {
        return Err(Error::Shape(format!("x has length {}, expected {}", x.len(), prob.dim())));
    }
    let xs = ridge_exact(&prob)?;
    let lhs = prob.energy_distance(x, &xs);
    let g = prob.rhs();
    let f = |v: &[f64]| {
        let av = prob.a.mul_vec(v);
        0.5 * (numeric::dot(&av, &av) + lambda * numeric::dot(v, v)) - numeric::dot(&g, v)
    };
    Ok((lhs, 2.0 * (f(x) - f(&xs))))
}

/// `Σᵢ (‖Pᵢ‖₂² / ‖P‖_F²) · nnz(Pᵢ)`.
pub fn expected_row_sparsity(p: &SparseMatrix) -> Result<f64> {
    let sq = p.row_sq_norms();
    let total = numeric::sum(sq.iter().copied());
    if total == 0.0 {
        return Err(Error::ZeroMatrix("expected row sparsity of a zero matrix".into()));
    }
    let mut acc = CompensatedSum::default();
    for (i, s) in sq.iter().enumerate() {
        acc.add(s / total * p.row_nnz(i) as f64);
    }
    Ok(acc.value())
}

#[derive(Debug, Clone, Serialize)]
pub struct InflationReport {
    pub trials: usize,
    pub eps: f64,
    pub sigma: f64,
    /// Monte Carlo mean of `‖Pᵢ‖₂²` per row.
    pub row_mean: Vec<f64>,
    pub row_se: Vec<f64>,
    /// `‖Aᵢ‖₂² + ε²‖A‖₂²`.
    pub row_bound: Vec<f64>,
    pub frob_mean: f64,
    pub frob_se: f64,
    /// `‖A‖_F² + ε² min(m, n) ‖A‖₂²`.
    pub frob_bound: f64,
    pub rows_ok: bool,
    pub frob_ok: bool,
}

impl InflationReport {
    pub fn passed(&self) -> bool {
        self.rows_ok && self.frob_ok
    }
}

/// Draws `trials` sparsifiers from `sampler(trial)` and compares the mean
/// squared row and Frobenius norms with their bounds, allowing 4 standard
/// errors of slack. `‖A‖₂` comes from the dense oracle.
pub fn row_norm_inflation_check<M, F>(a: &M, mut sampler: F, eps: f64, trials: usize) -> Result<InflationReport>
where
    M: MatrixLike,
    F: FnMut(usize) -> Result<SparseMatrix>,
{
    if trials < 2 {
        return Err(Error::InvalidArgument("need at least 2 trials".into()));
    }
    let sigma = oracle::spectral_norm(a)?;
    let base = a.to_sparse();
    let base_rows = base.row_sq_norms();
    let m = a.rows();
    let mut sum = vec![0.0; m];
    let mut sum_sq = vec![0.0; m];
    let (mut f_sum, mut f_sq) = (0.0, 0.0);
    for t in 0..trials {
        let p = sampler(t)?;
        if p.shape() != base.shape() {
            return Err(Error::Shape("sampler returned a matrix of the wrong shape".into()));
        }
        let rows = p.row_sq_norms();
        let f = numeric::sum(rows.iter().copied());
        for i in 0..m {
            sum[i] += rows[i];
            sum_sq[i] += rows[i] * rows[i];
        }
        f_sum += f;
        f_sq += f * f;
    }
    let n = trials as f64;
    let se = |s: f64, sq: f64| {
        let mean = s / n;
        ((sq / n - mean * mean).max(0.0) * n / (n - 1.0) / n).sqrt()
    };
    let slack = eps * eps * sigma * sigma;
    let row_mean: Vec<f64> = sum.iter().map(|s| s / n).collect();
    let row_se: Vec<f64> = sum.iter().zip(&sum_sq).map(|(s, q)| se(*s, *q)).collect();
    let row_bound: Vec<f64> = base_rows.iter().map(|r| r + slack).collect();
    let rows_ok = (0..m).all(|i| row_mean[i] <= row_bound[i] + 4.0 * row_se[i] + 1e-12 * row_bound[i]);
    let frob_mean = f_sum / n;
    let frob_se = se(f_sum, f_sq);
    let frob_bound = numeric::sum(base_rows.iter().copied()) + slack * a.rows().min(a.cols()) as f64;
    let frob_ok = frob_mean <= frob_bound + 4.0 * frob_se + 1e-12 * frob_bound;
    Ok(InflationReport {
        trials,
        eps,
        sigma,
        row_mean,
        row_se,
        row_bound,
        frob_mean,
        frob_se,
        frob_bound,
        rows_ok,
        frob_ok,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichCheck {
    /// Realized `‖A − P‖₂`.
    pub distance: f64,
    /// `√λ ε′`; the premise is `distance ≤ bound`.
    pub bound: f64,
    pub premise: bool,
    pub vectors: usize,
    /// Vectors with `(1−2ε′)q_A ≤ q_P ≤ (1+2ε′)q_A`, `q_M(x) = ‖Mx‖² + λ‖x‖²`.
    pub satisfied: usize,
    pub worst_low: f64,
    pub worst_high: f64,
}

/// Checks the quadratic-form sandwich on `count` Gaussian vectors.
pub fn check_sandwich_vectors<M: MatrixLike, N: MatrixLike>(
    a: &M,
    p: &N,
    lambda: f64,
    eps_prime: f64,
    count: usize,
    seed: u64,
) -> Result<SandwichCheck> {
    let diff = a.to_dense().sub(&p.to_dense())?;
    let distance = oracle::spectral_norm(&diff)?;
    let bound = lambda.sqrt() * eps_prime;
    let mut rng = Seed::new(seed).derive(stage::TRIAL).rng();
    let n = a.cols();
    let (mut satisfied, mut worst_low, mut worst_high) = (0, f64::INFINITY, 0.0f64);
    for _ in 0..count {
        let x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let reg = lambda * numeric::dot(&x, &x);
        let ax = a.mul_vec(&x);
        let px = p.mul_vec(&x);
        let qa = numeric::dot(&ax, &ax) + reg;
        let qp = numeric::dot(&px, &px) + reg;
        let ratio = qp / qa;
        worst_low = worst_low.min(ratio);
        worst_high = worst_high.max(ratio);
        let tol = 1e-12;
        if ratio >= (1.0 - 2.0 * eps_prime) * (1.0 - tol) && ratio <= (1.0 + 2.0 * eps_prime) * (1.0 + tol) {
            satisfied += 1;
        }
    }
    Ok(SandwichCheck { distance, bound, premise: distance <= bound, vectors: count, satisfied, worst_low, worst_high })
}
