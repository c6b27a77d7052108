use crate::error::{Error, Result};
use crate::matrix::{MatrixLike, SparseMatrix};
use crate::numeric;
use crate::power::PowerOptions;
use crate::rng::{stage, Seed};
use crate::stats::{profile, LineNorms, MatrixProfile};

use super::budget::{budget, SampleBudget};
use super::SampleConfig;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// The three entry distributions and their pointwise max.
///
/// * `p1(i,j) = |A_ij| / Σ|A|`
/// * `p2(i,j) = ‖A_i‖₁² / Σ_i' ‖A_i'‖₁² · |A_ij| / ‖A_i‖₁`
/// * `p3(i,j) = ‖Aʲ‖₁² / Σ_j' ‖Aʲ'‖₁² · |A_ij| / ‖Aʲ‖₁`
#[derive(Debug, Clone, PartialEq)]
pub struct HybridDistribution {
    l1_total: f64,
    row_l1: Vec<f64>,
    col_l1: Vec<f64>,
    row_sq_total: f64,
    col_sq_total: f64,
}

impl HybridDistribution {
    pub fn from_line_norms(norms: &LineNorms) -> Result<Self> {
        Self::from_l1(norms.l1_total, &norms.row_l1, &norms.col_l1)
    }

    pub fn from_profile(p: &MatrixProfile) -> Result<Self> {
        Self::from_l1(p.l1_total, &p.row_l1, &p.col_l1)
    }

    fn from_l1(l1_total: f64, row_l1: &[f64], col_l1: &[f64]) -> Result<Self> {
        if l1_total == 0.0 {
            return Err(Error::ZeroMatrix("hybrid distribution of a zero matrix".into()));
        }
        Ok(Self {
            l1_total,
            row_l1: row_l1.to_vec(),
            col_l1: col_l1.to_vec(),
            row_sq_total: numeric::sum(row_l1.iter().map(|r| r * r)),
            col_sq_total: numeric::sum(col_l1.iter().map(|c| c * c)),
        })
    }

    #[inline]
    pub fn p1(&self, _i: usize, _j: usize, a: f64) -> f64 {
        a.abs() / self.l1_total
    }

    #[inline]
    pub fn p2(&self, i: usize, _j: usize, a: f64) -> f64 {
        if a == 0.0 {
            return 0.0;
        }
        self.row_l1[i] * a.abs() / self.row_sq_total
    }

    #[inline]
    pub fn p3(&self, _i: usize, j: usize, a: f64) -> f64 {
        if a == 0.0 {
            return 0.0;
        }
        self.col_l1[j] * a.abs() / self.col_sq_total
    }

    #[inline]
    pub fn pstar(&self, i: usize, j: usize, a: f64) -> f64 {
        self.p1(i, j, a).max(self.p2(i, j, a)).max(self.p3(i, j, a))
    }
}

/// A matrix prepared for repeated hybrid sampling: keep probabilities
/// `min(1, s·p*)` are computed once, every [`sample`](Self::sample) call is a
/// cheap pass over the nonzeros.
#[derive(Debug, Clone)]
pub struct HybridSparsifier {
    rows: usize,
    cols: usize,
    /// `(i, j, A_ij, keep probability)`
    entries: Vec<(usize, usize, f64, f64)>,
    budget: SampleBudget,
}

impl HybridSparsifier {
    /// Profiles `a` (power method seeded from `cfg.seed`) and sizes the
    /// budget from it.
    pub fn new<M: MatrixLike>(a: &M, cfg: &SampleConfig) -> Result<Self> {
        cfg.validate()?;
        let prof = profile(a, PowerOptions::default().tol, cfg.seed)?;
        Self::with_profile(a, &prof, cfg)
    }

    pub fn with_profile<M: MatrixLike>(a: &M, prof: &MatrixProfile, cfg: &SampleConfig) -> Result<Self> {
        let b = budget(prof, cfg)?;
        let dist = HybridDistribution::from_profile(prof)?;
        Ok(Self::build(a, &dist, b))
    }

    /// Uses budget `s` directly, bypassing the spectral-norm estimate.
    pub fn with_budget<M: MatrixLike>(a: &M, s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidArgument(format!("budget must be > 0, got {s}")));
        }
        let dist = HybridDistribution::from_line_norms(&LineNorms::of(a))?;
        let b = SampleBudget { s, term_bernstein: f64::NAN, term_linear: f64::NAN };
        Ok(Self::build(a, &dist, b))
    }

    fn build<M: MatrixLike>(a: &M, dist: &HybridDistribution, budget: SampleBudget) -> Self {
        let mut entries = Vec::with_capacity(a.nnz());
        a.for_each_nonzero(|i, j, v| {
            let p = (budget.s * dist.pstar(i, j, v)).min(1.0);
            entries.push((i, j, v, p));
        });
        Self { rows: a.rows(), cols: a.cols(), entries, budget }
    }

    pub fn budget(&self) -> &SampleBudget {
        &self.budget
    }

    /// `E[nnz(Ã)] = Σ p_ij`.
    pub fn expected_nnz(&self) -> f64 {
        numeric::sum(self.entries.iter().map(|e| e.3))
    }

    /// Keep probabilities in row-major order of the nonzeros.
    pub fn keep_probabilities(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.entries.iter().map(|&(i, j, _, p)| (i, j, p))
    }

    /// One independent draw. Entry `(i, j)` uses its own counter-addressed
    /// uniform, so the result is identical with or without threads.
    pub fn sample(&self, seed: u64) -> SparseMatrix {
        let root = Seed::new(seed).derive(stage::HYBRID);
        let keep = |&(i, j, v, p): &(usize, usize, f64, f64)| {
            if p >= 1.0 {
                Some((i, j, v))
            } else if root.uniform_at(i as u64, j as u64) < p {
                Some((i, j, v / p))
            } else {
                None
            }
        };
        #[cfg(feature = "parallel")]
        let kept: Vec<_> = self.entries.par_iter().filter_map(keep).collect();
        #[cfg(not(feature = "parallel"))]
        let kept: Vec<_> = self.entries.iter().filter_map(keep).collect();
        SparseMatrix::from_sorted_unchecked(self.rows, self.cols, kept)
    }
}

/// Samples every nonzero independently with probability `min(1, s·p*_ij)` and
/// rescales kept entries by `1 / p_ij`.
pub fn sparsify_hybrid<M: MatrixLike>(a: &M, cfg: &SampleConfig) -> Result<SparseMatrix> {
    Ok(HybridSparsifier::new(a, cfg)?.sample(cfg.seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::DenseMatrix;

    fn sample_matrix() -> DenseMatrix {
        DenseMatrix::from_rows(&[vec![1.0, -2.0, 0.0, 0.5], vec![0.0, 3.0, 0.1, 0.0], vec![4.0, 0.0, 0.0, -1.0]])
            .unwrap()
    }

    #[test]
    fn distributions_sum_to_one_and_pstar_dominates() {
        let a = sample_matrix();
        let dist = HybridDistribution::from_line_norms(&LineNorms::of(&a)).unwrap();
        let (mut s1, mut s2, mut s3) = (0.0, 0.0, 0.0);
        a.for_each_nonzero(|i, j, v| {
            let (p1, p2, p3) = (dist.p1(i, j, v), dist.p2(i, j, v), dist.p3(i, j, v));
            s1 += p1;
            s2 += p2;
            s3 += p3;
            let ps = dist.pstar(i, j, v);
            assert!(ps >= p1 && ps >= p2 && ps >= p3 && ps > 0.0);
        });
        for s in [s1, s2, s3] {
            assert!((s - 1.0).abs() < 1e-9);
        }
        assert_eq!(dist.pstar(1, 0, 0.0), 0.0);
    }

    #[test]
    fn saturated_budget_returns_input() {
        let a = sample_matrix();
        let sp = HybridSparsifier::with_budget(&a, 1e9).unwrap();
        assert_eq!(sp.sample(5).to_dense(), a);
        let i2 = DenseMatrix::identity(2);
        let cfg = SampleConfig::new(0.5, 1.0, 3).with_budget(1e6);
        assert_eq!(sparsify_hybrid(&i2, &cfg).unwrap().to_dense(), i2);
    }

    #[test]
    fn kept_entries_are_rescaled() {
        let a = sample_matrix();
        let sp = HybridSparsifier::with_budget(&a, 2.0).unwrap();
        let probs: std::collections::HashMap<_, _> = sp.keep_probabilities().map(|(i, j, p)| ((i, j), p)).collect();
        for seed in 0..20 {
            for &(i, j, v) in sp.sample(seed).entries() {
                let p = probs[&(i, j)];
                assert!((v * p - a.get(i, j)).abs() < 1e-12);
            }
        }
        assert!(sp.expected_nnz() <= 3.0 * 2.0 + 1e-12);
    }

    #[test]
    fn zero_matrix_rejected() {
        assert!(HybridSparsifier::with_budget(&DenseMatrix::zeros(2, 2), 1.0).is_err());
    }
}
