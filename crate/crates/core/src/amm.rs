//! Approximate matrix multiplication through outer-product sampling.
//!
//! `AB = Σ_i Aⁱ B_i` (column `i` of `A` times row `i` of `B`). Both
//! estimators first sparsify the factors entrywise and then sample a few
//! outer products with probability proportional to `‖Aⁱ‖₂‖B_i‖₂`.

use std::fmt;
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, MatrixLike, SparseMatrix};
use crate::numeric::{self, ceil_count};
use crate::rng::{stage, Seed};
use crate::sparsify::{l1_row_budget, l1_sample_vector, sparsify_l1_rows};
use crate::stats::{matrix_ns, numerical_sparsity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorNorm {
    Spectral,
    Frobenius,
}

impl fmt::Display for ErrorNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorNorm::Spectral => "spectral",
            ErrorNorm::Frobenius => "frobenius",
        })
    }
}

impl FromStr for ErrorNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spectral" => Ok(ErrorNorm::Spectral),
            "frobenius" => Ok(ErrorNorm::Frobenius),
            other => Err(Error::InvalidArgument(format!("unknown norm `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmmReport {
    /// Estimate of `AB`, shape `m × p`.
    pub product: DenseMatrix,
    pub pairs_sampled: usize,
    /// Total ℓ1 draws spent sparsifying the factors.
    pub entry_samples: usize,
    pub err_metric: ErrorNorm,
    pub err_value: Option<f64>,
}

fn check_inner(a: &impl MatrixLike, b: &impl MatrixLike) -> Result<()> {
    if a.cols() != b.rows() {
        return Err(Error::Shape(format!(
            "inner dimensions differ: A is {}x{}, B is {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(())
}

fn check_eps(eps: f64, upper: f64) -> Result<()> {
    if !(eps > 0.0 && eps < upper) {
        return Err(Error::InvalidArgument(format!("eps must be in (0, {upper}), got {eps}")));
    }
    Ok(())
}

/// Both AMM algorithms accept `ε = 1/2`, the operating point of their tests.
fn check_amm_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::InvalidArgument(format!("eps must be in (0, 1/2], got {eps}")));
    }
    Ok(())
}

/// Sparse estimates `(a′, b′)` with `E[a′b′ᵀ] = abᵀ` and
/// `E‖a′b′ᵀ − abᵀ‖_F² ≤ ε²‖a‖₂²‖b‖₂²`, from `ceil(9ε⁻² ns)` ℓ1 draws on each
/// side (independent streams).
pub fn outer_product_estimate(a: &[f64], b: &[f64], eps: f64, seed: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    check_eps(eps, 1.0)?;
    let (a2, b2, _) = outer_product_estimate_seeded(a, b, eps, Seed::new(seed))?;
    Ok((a2, b2))
}

/// Number of ℓ1 draws for one side of the outer-product estimator.
pub fn outer_product_draws(ns: f64, eps: f64) -> usize {
    if ns == 0.0 {
        0
    } else {
        ceil_count(9.0 * ns / (eps * eps))
    }
}

fn outer_product_estimate_seeded(a: &[f64], b: &[f64], eps: f64, seed: Seed) -> Result<(Vec<f64>, Vec<f64>, usize)> {
    let ca = outer_product_draws(numerical_sparsity(a)?, eps);
    let cb = outer_product_draws(numerical_sparsity(b)?, eps);
    let a2 = l1_sample_vector(a, ca, seed.derive(stage::OUTER_A));
    let b2 = l1_sample_vector(b, cb, seed.derive(stage::OUTER_B));
    Ok((a2, b2, ca + cb))
}

/// `(1/c) Σ_t Aⁱᵗ B_iₜ / p_iₜ` over `c` draws with `p_i ∝ ‖Aⁱ‖₂‖B_i‖₂`.
/// Returns the zero matrix when every weight vanishes.
pub fn sample_outer_products<M: MatrixLike, N: MatrixLike>(a: &M, b: &N, c: usize, seed: u64) -> Result<DenseMatrix> {
    check_inner(a, b)?;
    if c == 0 {
        return Err(Error::InvalidArgument("pair count must be at least 1".into()));
    }
    Ok(sample_outer_products_seeded(&a.to_sparse(), &b.to_sparse(), c, Seed::new(seed)))
}

fn sample_outer_products_seeded(a: &SparseMatrix, b: &SparseMatrix, c: usize, seed: Seed) -> DenseMatrix {
    let (m, n, p) = (a.rows(), a.cols(), b.cols());
    let at = a.transpose();
    let weights: Vec<f64> = (0..n)
        .map(|i| {
            let ca = numeric::sum(at.row_entries(i).iter().map(|e| e.2 * e.2)).sqrt();
            let rb = numeric::sum(b.row_entries(i).iter().map(|e| e.2 * e.2)).sqrt();
            ca * rb
        })
        .collect();
    let total = numeric::sum(weights.iter().copied());
    let mut out = DenseMatrix::zeros(m, p);
    if total == 0.0 {
        return out;
    }
    let support: Vec<usize> = (0..n).filter(|&i| weights[i] > 0.0).collect();
    let mut hits = vec![0usize; n];
    if support.len() == 1 {
        hits[support[0]] = c;
    } else {
        let dist =
            WeightedIndex::new(support.iter().map(|&i| weights[i])).expect("pair weights are positive and finite");
        let mut rng = seed.derive(stage::PAIRS).rng();
        for _ in 0..c {
            hits[support[dist.sample(&mut rng)]] += 1;
        }
    }
    let mut data = out.clone().into_data();
    for i in 0..n {
        if hits[i] == 0 {
            continue;
        }
        let factor = (hits[i] as f64 / c as f64) * (total / weights[i]);
        for &(_, r, av) in at.row_entries(i) {
            let row = &mut data[r * p..(r + 1) * p];
            for &(_, q, bv) in b.row_entries(i) {
                row[q] += factor * av * bv;
            }
        }
    }
    out = DenseMatrix::new(m, p, data).expect("finite products");
    out
}

/// Pair count that gives `E‖AB − C‖_F ≤ ε‖A‖_F‖B‖_F` for the
/// norm-proportional pair sampler: `ceil(ε⁻²)`.
pub fn frobenius_pair_count(eps: f64) -> usize {
    ceil_count(1.0 / (eps * eps))
}

/// Sparsified factors `Â`, `B̂` and the product estimate of the Frobenius
/// pipeline.
#[derive(Debug, Clone)]
pub struct FrobeniusAmmParts {
    pub a_hat: SparseMatrix,
    pub b_hat: SparseMatrix,
    pub report: AmmReport,
}

/// `E‖AB − C‖_F ≤ ε‖A‖_F‖B‖_F` for `ε ∈ (0, 1/2]`: every pair `(Aⁱ, B_i)` is
/// sparsified by [`outer_product_estimate`] at `ε/3`, then
/// [`sample_outer_products`] runs on `(Â, B̂)` at `ε/3`.
pub fn amm_frobenius<M: MatrixLike, N: MatrixLike>(a: &M, b: &N, eps: f64, seed: u64) -> Result<AmmReport> {
    Ok(amm_frobenius_parts(a, b, eps, seed)?.report)
}

pub fn amm_frobenius_parts<M: MatrixLike, N: MatrixLike>(
    a: &M,
    b: &N,
    eps: f64,
    seed: u64,
) -> Result<FrobeniusAmmParts> {
    check_inner(a, b)?;
    check_amm_eps(eps)?;
    let third = eps / 3.0;
    let root = Seed::new(seed);
    let at = a.to_sparse().transpose();
    let bs = b.to_sparse();
    let (m, n, p) = (a.rows(), a.cols(), b.cols());

    let mut a_entries = Vec::new();
    let mut b_entries = Vec::new();
    let mut entry_samples = 0;
    let mut col = vec![0.0; m];
    let mut row = vec![0.0; p];
    for i in 0..n {
        col.fill(0.0);
        row.fill(0.0);
        for &(_, r, v) in at.row_entries(i) {
            col[r] = v;
        }
        for &(_, q, v) in bs.row_entries(i) {
            row[q] = v;
        }
        let (ca, rb, draws) = outer_product_estimate_seeded(&col, &row, third, root.derive2(stage::VECTOR, i as u64))?;
        entry_samples += draws;
        a_entries.extend(ca.iter().enumerate().filter(|e| *e.1 != 0.0).map(|(r, &v)| (r, i, v)));
        b_entries.extend(rb.iter().enumerate().filter(|e| *e.1 != 0.0).map(|(q, &v)| (i, q, v)));
    }
    let a_hat = SparseMatrix::from_triplets(m, n, a_entries)?;
    let b_hat = SparseMatrix::from_triplets(n, p, b_entries)?;
    let pairs = frobenius_pair_count(third);
    let product = sample_outer_products_seeded(&a_hat, &b_hat, pairs, root.derive(stage::PAIRS));
    Ok(FrobeniusAmmParts {
        a_hat,
        b_hat,
        report: AmmReport {
            product,
            pairs_sampled: pairs,
            entry_samples,
            err_metric: ErrorNorm::Frobenius,
            err_value: None,
        },
    })
}

/// Calibrated constants of the spectral pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralAmmConstants {
    /// Multiplier on the ℓ1-row budget `ε⁻² ns ln(m + n)`.
    pub c_l1: f64,
    /// Multiplier on the spectral pair count.
    pub c_mz: f64,
}

/// Pair count `ceil(C · ε⁻² √(sr_A sr_B) · ln(ε⁻¹ sr_A sr_B (m + p)))`.
pub fn spectral_pair_count(c_mz: f64, eps: f64, sr_a: f64, sr_b: f64, m: usize, p: usize) -> usize {
    let prod = sr_a * sr_b;
    let log_arg = (prod * (m + p) as f64 / eps).max(std::f64::consts::E);
    ceil_count(c_mz * prod.sqrt() * log_arg.ln() / (eps * eps))
}

#[derive(Debug, Clone)]
pub struct SpectralAmmParts {
    /// `A′`, bounded column sparsity.
    pub a_sparse: SparseMatrix,
    /// `B′`, bounded row sparsity.
    pub b_sparse: SparseMatrix,
    pub draws_per_col_a: usize,
    pub draws_per_row_b: usize,
    pub report: AmmReport,
}

/// `‖AB − C‖₂ ≤ ε‖A‖₂‖B‖₂` with high probability for `ε ∈ (0, 1/2]`, given
/// constant-factor estimates of `‖A‖₂` and `‖B‖₂`.
///
/// `A′` is ℓ1-row sampling of `Aᵀ` (transposed back) and `B′` ℓ1-row
/// sampling of `B`, both at `ε/4`; the pair sampler then runs on `(A′, B′)`
/// at `ε/4`.
pub fn amm_spectral<M: MatrixLike, N: MatrixLike>(
    a: &M,
    b: &N,
    eps: f64,
    sigma_a: f64,
    sigma_b: f64,
    consts: &SpectralAmmConstants,
    seed: u64,
) -> Result<AmmReport> {
    Ok(amm_spectral_parts(a, b, eps, sigma_a, sigma_b, consts, seed)?.report)
}

pub fn amm_spectral_parts<M: MatrixLike, N: MatrixLike>(
    a: &M,
    b: &N,
    eps: f64,
    sigma_a: f64,
    sigma_b: f64,
    consts: &SpectralAmmConstants,
    seed: u64,
) -> Result<SpectralAmmParts> {
    check_inner(a, b)?;
    check_amm_eps(eps)?;
    for (name, s) in [("sigma_a", sigma_a), ("sigma_b", sigma_b)] {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidArgument(format!("{name} must be positive, got {s}")));
        }
    }
    let quarter = eps / 4.0;
    let root = Seed::new(seed);
    let (m, n, p) = (a.rows(), a.cols(), b.cols());

    let ns_a = matrix_ns(a);
    let ns_b = matrix_ns(b);
    let draws_a = l1_row_budget(ns_a.max(1.0), n, m, quarter, consts.c_l1);
    let draws_b = l1_row_budget(ns_b.max(1.0), n, p, quarter, consts.c_l1);
    let at = a.to_sparse().transpose();
    let a_sparse = sparsify_l1_rows(&at, draws_a, root.derive(stage::OUTER_A).value())?.transpose();
    let b_sparse = sparsify_l1_rows(b, draws_b, root.derive(stage::OUTER_B).value())?;

    let fa = a_sparse.frobenius();
    let fb = b_sparse.frobenius();
    let sr_a = (fa * fa / (sigma_a * sigma_a)).max(1.0);
    let sr_b = (fb * fb / (sigma_b * sigma_b)).max(1.0);
    let pairs = spectral_pair_count(consts.c_mz, quarter, sr_a, sr_b, m, p);
    let product = sample_outer_products_seeded(&a_sparse, &b_sparse, pairs, root.derive(stage::PAIRS));
    Ok(SpectralAmmParts {
        draws_per_col_a: draws_a,
        draws_per_row_b: draws_b,
        report: AmmReport {
            product,
            pairs_sampled: pairs,
            entry_samples: draws_a * at.rows() + draws_b * b_sparse.rows(),
            err_metric: ErrorNorm::Spectral,
            err_value: None,
        },
        a_sparse,
        b_sparse,
    })
}
