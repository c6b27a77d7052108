//! The row-sparsity lower-bound family: a geometric tail vector, its
//! circulant matrix, and the Hadamard lift `A′ = circ(a) ⊗ H_k`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, MatrixLike};
use crate::numeric::{self, is_power_of_two};

#[derive(Debug, Clone)]
pub struct HardInstance {
    pub n: usize,
    /// `n / k`, the tail-vector length.
    pub m: usize,
    pub k: usize,
    pub alpha: f64,
    pub a: Vec<f64>,
    pub aprime: DenseMatrix,
}

impl HardInstance {
    /// `‖A′‖₂ = √k ‖a‖₁`, exact for nonnegative `a`.
    pub fn spectral_norm(&self) -> f64 {
        (self.k as f64).sqrt() * tail_l1_closed_form(self.m, self.alpha)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("alpha must be in (0, 1), got {alpha}")))
    }
}

/// `a_j = 2^{−(1+α)⌊log₂ j⌋}` for `j = 1..m−1` and `a_m = 0`.
pub fn build_tail_vector(m: usize, alpha: f64) -> Result<Vec<f64>> {
    if m < 2 || !is_power_of_two(m) {
        return Err(Error::InvalidArgument(format!("m must be a power of two ≥ 2, got {m}")));
    }
    check_alpha(alpha)?;
    let mut a: Vec<f64> = (1..m)
        .map(|j| {
            let block = usize::BITS - 1 - j.leading_zeros();
            (-(1.0 + alpha) * block as f64).exp2()
        })
        .collect();
    a.push(0.0);
    Ok(a)
}

/// `‖a‖₁ = (1 − 2^{−α log₂ m}) / (1 − 2^{−α})`.
pub fn tail_l1_closed_form(m: usize, alpha: f64) -> f64 {
    let l = (m as f64).log2();
    (1.0 - (-alpha * l).exp2()) / (1.0 - (-alpha).exp2())
}

/// ℓ2 norm of `a` with its `c` largest-magnitude entries removed (ties go to
/// the lower index first).
pub fn tail_norm(a: &[f64], c: usize) -> f64 {
    let c = c.min(a.len());
    let mut idx: Vec<usize> = (0..a.len()).collect();
    idx.sort_by(|&x, &y| a[y].abs().total_cmp(&a[x].abs()).then(x.cmp(&y)));
    numeric::sum(idx[c..].iter().map(|&i| a[i] * a[i])).sqrt()
}

/// Row `j` is `a` rotated right by `j`: `C[j][c] = a[(c − j) mod m]`.
pub fn build_circulant(a: &[f64]) -> DenseMatrix {
    let m = a.len();
    DenseMatrix::from_fn(m, m, |j, c| a[(c + m - j) % m])
}

/// Sylvester Hadamard matrix: `H[i][j] = (−1)^{popcount(i & j)}`.
pub fn hadamard(k: usize) -> Result<DenseMatrix> {
    if !is_power_of_two(k) {
        return Err(Error::InvalidArgument(format!("Hadamard order must be a power of two, got {k}")));
    }
    Ok(DenseMatrix::from_fn(k, k, |i, j| if (i & j).count_ones() % 2 == 0 { 1.0 } else { -1.0 }))
}

pub fn kronecker(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let (p, q) = b.shape();
    DenseMatrix::from_fn(a.rows() * p, a.cols() * q, |r, c| a.get(r / p, c / q) * b.get(r % p, c % q))
}

pub fn build_hard_matrix(n: usize, k: usize, alpha: f64) -> Result<HardInstance> {
    if !is_power_of_two(n) || !is_power_of_two(k) {
        return Err(Error::InvalidArgument(format!("n and k must be powers of two, got n={n}, k={k}")));
    }
    if n % k != 0 || n / k < 2 {
        return Err(Error::InvalidArgument(format!("k must divide n with n/k ≥ 2, got n={n}, k={k}")));
    }
    let m = n / k;
    let a = build_tail_vector(m, alpha)?;
    let aprime = kronecker(&build_circulant(&a), &hadamard(k)?);
    Ok(HardInstance { n, m, k, alpha, a, aprime })
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbePoint {
    pub s: usize,
    /// `min_j ‖A′_j tail(s)‖₂ / ‖A′‖₂`: relative spectral error forced on any
    /// approximation with a row of `s` nonzeros.
    pub lower_bound: f64,
    pub exceeds_eps: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub n: usize,
    pub k: usize,
    pub alpha: f64,
    pub eps: f64,
    pub spectral_norm: f64,
    pub points: Vec<ProbePoint>,
    /// Smallest grid value whose bound is at most `eps`.
    pub s_star: Option<usize>,
}

/// Per-row necessity scan: keeping the `s` largest entries of a row is the
/// best any `s`-sparse row can do, so its residual bounds the error from below.
pub fn sparsity_necessity_probe(inst: &HardInstance, eps: f64, s_grid: &[usize]) -> Result<ProbeReport> {
    if inst.n > 256 {
        return Err(Error::OracleScale(format!("probe supports n ≤ 256, got {}", inst.n)));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    let sigma = inst.spectral_norm();
    let points: Vec<ProbePoint> = s_grid
        .iter()
        .map(|&s| {
            let tail = (0..inst.n).map(|j| tail_norm(inst.aprime.row(j), s)).fold(f64::INFINITY, f64::min);
            let lower_bound = tail / sigma;
            ProbePoint { s, lower_bound, exceeds_eps: lower_bound > eps }
        })
        .collect();
    let s_star = points.iter().filter(|p| !p.exceeds_eps).map(|p| p.s).min();
    Ok(ProbeReport { n: inst.n, k: inst.k, alpha: inst.alpha, eps, spectral_norm: sigma, points, s_star })
}

/// `k · ε⁻² · log₂⁻²(1/ε)`, the predicted row-sparsity scale at `α = 1/log₂(1/ε)`.
pub fn predicted_row_sparsity(k: usize, eps: f64) -> f64 {
    let l = (1.0 / eps).log2();
    k as f64 / (eps * eps * l * l)
}
