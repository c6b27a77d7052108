use serde::Serialize;

use super::SampleConfig;
use crate::error::{Error, Result};
use crate::stats::MatrixProfile;

/// Expected-sample budget of the hybrid sampler.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleBudget {
    pub s: f64,
    /// `ε⁻² · ns · sr · ln m`
    pub term_bernstein: f64,
    /// `ε⁻¹ · √(ns · sr · n) · ln m`
    pub term_linear: f64,
}

/// `s = C · (ε⁻² ns sr ln m + ε⁻¹ √(ns sr n) ln m)` with `m` the larger and
/// `n` the smaller dimension, unless the config carries an explicit budget.
pub fn budget(profile: &MatrixProfile, cfg: &SampleConfig) -> Result<SampleBudget> {
    cfg.validate()?;
    if profile.is_zero() || profile.ns == 0.0 {
        return Err(Error::ZeroMatrix("sample budget needs a nonzero matrix".into()));
    }
    let sr = profile.sr.ok_or_else(|| Error::ZeroMatrix("stable rank undefined".into()))?;
    let (m, n) = profile.dims_max_min();
    // ln 1 = 0 would zero the budget on a single row or column.
    let m = m.max(2) as f64;
    let mut b = budget_from_parts(profile.ns, sr, m, n as f64, cfg.eps, cfg.c_over);
    if let Some(s) = cfg.budget_override {
        b.s = s;
    }
    Ok(b)
}

/// The budget formula on raw inputs; `m` and `n` may be non-integral.
pub fn budget_from_parts(ns: f64, sr: f64, m: f64, n: f64, eps: f64, c_over: f64) -> SampleBudget {
    let ln_m = m.ln();
    let term_bernstein = ns * sr * ln_m / (eps * eps);
    let term_linear = (ns * sr * n).sqrt() * ln_m / eps;
    SampleBudget { s: c_over * (term_bernstein + term_linear), term_bernstein, term_linear }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::DenseMatrix;
    use crate::stats::profile_with_sigma;

    #[test]
    fn unit_inputs_with_n_equal_e() {
        // The linear term carries √n, so n = e gives 1 + √e rather than 2.
        let e = std::f64::consts::E;
        let b = budget_from_parts(1.0, 1.0, e, e, 1.0, 1.0);
        assert!((b.term_bernstein - 1.0).abs() < 1e-15);
        assert!((b.s - (1.0 + e.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn unit_inputs_with_unit_n() {
        // ns = sr = n = 1, ln m = 1, ε = C = 1: both terms are 1.
        let b = budget_from_parts(1.0, 1.0, std::f64::consts::E, 1.0, 1.0, 1.0);
        assert!((b.s - 2.0).abs() < 1e-12);
    }

    #[test]
    fn identity_four() {
        let p = profile_with_sigma(&DenseMatrix::identity(4), 1.0, true);
        let b = budget(&p, &SampleConfig::new(0.5, 1.0, 0)).unwrap();
        let ln4 = 4f64.ln();
        let expected = 4.0 * 1.0 * 4.0 * ln4 + 2.0 * (1.0f64 * 4.0 * 4.0).sqrt() * ln4;
        assert!((b.s - expected).abs() < 1e-12 * expected);
        assert!((b.term_bernstein - 16.0 * ln4).abs() < 1e-12);
    }

    #[test]
    fn override_wins() {
        let p = profile_with_sigma(&DenseMatrix::identity(4), 1.0, true);
        let b = budget(&p, &SampleConfig::new(0.5, 1.0, 0).with_budget(100.0)).unwrap();
        assert_eq!(b.s, 100.0);
    }

    #[test]
    fn zero_matrix_is_an_error() {
        let p = profile_with_sigma(&DenseMatrix::zeros(3, 3), 0.0, true);
        assert!(matches!(budget(&p, &SampleConfig::new(0.5, 1.0, 0)), Err(Error::ZeroMatrix(_))));
    }
}
