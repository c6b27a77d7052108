use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;

use crate::error::{Error, Result};
use crate::numeric::{self, ceil_count};
use crate::rng::Seed;
use crate::stats::numerical_sparsity;

/// `count` draws with replacement from `p_i = |a_i| / ‖a‖₁`; each draw adds
/// `a_i / (p_i · count)`. Returns the zero vector for a zero input.
pub fn l1_sample_vector(a: &[f64], count: usize, seed: Seed) -> Vec<f64> {
    let mut out = vec![0.0; a.len()];
    let support: Vec<usize> = (0..a.len()).filter(|&i| a[i] != 0.0).collect();
    if support.is_empty() || count == 0 {
        return out;
    }
    let l1 = numeric::norm1(a);
    let mut hits = vec![0usize; support.len()];
    if support.len() == 1 {
        hits[0] = count;
    } else {
        let dist = WeightedIndex::new(support.iter().map(|&i| a[i].abs())).expect("weights are positive and finite");
        let mut rng = seed.rng();
        for _ in 0..count {
            hits[dist.sample(&mut rng)] += 1;
        }
    }
    for (&i, h) in support.iter().zip(hits) {
        if h > 0 {
            out[i] = a[i].signum() * l1 * (h as f64 / count as f64);
        }
    }
    out
}

/// Unbiased sparse estimate of `a` from `ceil(ε⁻² ns(a))` ℓ1 draws, with
/// `E‖a′‖₂² ≤ (1 + ε²)‖a‖₂²`.
pub fn sparsify_vector_l1(a: &[f64], eps: f64, seed: u64) -> Result<Vec<f64>> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("eps must be > 0, got {eps}")));
    }
    let ns = numerical_sparsity(a)?;
    if ns == 0.0 {
        return Ok(vec![0.0; a.len()]);
    }
    Ok(l1_sample_vector(a, ceil_count(ns / (eps * eps)), Seed::new(seed)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_sparse_is_exact() {
        let a = [0.0, -0.3, 0.0, 0.0];
        assert_eq!(sparsify_vector_l1(&a, 0.1, 9).unwrap(), a);
    }

    #[test]
    fn zero_vector() {
        assert_eq!(sparsify_vector_l1(&[0.0; 3], 0.5, 1).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn pair_outcomes() {
        // [1, 1] at ε = 1 takes 2 draws: [2, 0], [0, 2] w.p. 1/4 each, [1, 1] w.p. 1/2.
        let mut counts = [0usize; 3];
        let trials = 8000;
        let mut mean = [0.0; 2];
        for seed in 0..trials {
            let v = sparsify_vector_l1(&[1.0, 1.0], 1.0, seed).unwrap();
            match (v[0], v[1]) {
                (2.0, 0.0) => counts[0] += 1,
                (0.0, 2.0) => counts[1] += 1,
                (1.0, 1.0) => counts[2] += 1,
                other => panic!("unexpected outcome {other:?}"),
            }
            mean[0] += v[0];
            mean[1] += v[1];
        }
        let n = trials as f64;
        let se_quarter = (0.25 * 0.75 / n).sqrt();
        assert!((counts[0] as f64 / n - 0.25).abs() < 4.0 * se_quarter);
        assert!((counts[1] as f64 / n - 0.25).abs() < 4.0 * se_quarter);
        // Each coordinate has variance 1/2.
        for m in mean {
            assert!((m / n - 1.0).abs() < 4.0 * (0.5 / n).sqrt());
        }
    }

    #[test]
    fn rejects_bad_eps() {
        assert!(sparsify_vector_l1(&[1.0], 0.0, 0).is_err());
    }
}
