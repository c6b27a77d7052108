//! Seeded trial runner. Trial `t` of root seed `r` always sees the stream
//! `Seed(r).derive2(TRIAL, t)`, so running trials concurrently or in a
//! different order never changes a result.

use serde::Serialize;

use crate::rng::{stage, Seed};

pub fn trial_seed(root: u64, trial: usize) -> u64 {
    Seed::new(root).derive2(stage::TRIAL, trial as u64).value()
}

/// Runs `f(trial, seed)` for every trial, returning results in trial order.
pub fn run_trials<T, F>(root: u64, trials: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..trials).into_par_iter().map(|t| f(t, trial_seed(root, t))).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..trials).map(|t| f(t, trial_seed(root, t))).collect()
    }
}

/// Mean and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanSe {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

impl MeanSe {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self { mean: f64::NAN, se: f64::NAN, n };
        }
        let mean = crate::numeric::sum(values.iter().copied()) / n as f64;
        if n == 1 {
            return Self { mean, se: 0.0, n };
        }
        let var = crate::numeric::sum(values.iter().map(|v| (v - mean) * (v - mean))) / (n - 1) as f64;
        Self { mean, se: (var / n as f64).sqrt(), n }
    }
}

pub fn success_fraction(outcomes: &[bool]) -> f64 {
    if outcomes.is_empty() {
        return 0.0;
    }
    outcomes.iter().filter(|&&b| b).count() as f64 / outcomes.len() as f64
}

/// Binomial standard error `√(p(1 − p)/T)`.
pub fn binomial_se(p: f64, trials: usize) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// Lower end of the Wilson score interval for `successes / trials` at `z`
/// standard deviations.
pub fn wilson_lower(successes: usize, trials: usize, z: f64) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let centre = p + z2 / (2.0 * n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half) / (1.0 + z2 / n)).max(0.0)
}
