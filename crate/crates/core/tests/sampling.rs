use numsparse::amm::outer_product_estimate;
use numsparse::montecarlo::{binomial_se, run_trials, success_fraction, MeanSe};
use numsparse::oracle::spectral_distance;
use numsparse::sparsify::{sparsify_l1_rows, sparsify_vector_l1, HybridSparsifier, SampleConfig};
use numsparse::{numeric, DenseMatrix};

#[test]
fn l1_rows_is_unbiased() {
    let a = DenseMatrix::random_gaussian(4, 7, 50);
    let samples = run_trials(51, 20_000, |_, seed| DenseMatrix::from(&sparsify_l1_rows(&a, 3, seed).unwrap()));
    for i in 0..4 {
        for j in 0..7 {
            let v: Vec<f64> = samples.iter().map(|s| s.get(i, j)).collect();
            let st = MeanSe::of(&v);
            assert!((st.mean - a.get(i, j)).abs() <= 4.0 * st.se + 1e-12, "({i},{j})");
        }
    }
}

#[test]
fn vector_sparsifier_second_moment() {
    let a: Vec<f64> = (1..=40).map(|i| 1.0 / i as f64).collect();
    let a2 = numeric::norm2(&a).powi(2);
    for eps in [0.5, 0.25] {
        let sq: Vec<f64> =
            run_trials(52, 4000, |_, seed| numeric::norm2(&sparsify_vector_l1(&a, eps, seed).unwrap()).powi(2));
        let st = MeanSe::of(&sq);
        assert!(st.mean <= (1.0 + eps * eps) * a2 + 4.0 * st.se, "ε={eps}: {} vs {}", st.mean, (1.0 + eps * eps) * a2);
    }
}

#[test]
fn outer_product_estimate_error_energy() {
    let a: Vec<f64> = (0..20).map(|i| ((i * 7) % 5) as f64 - 2.0).collect();
    let b: Vec<f64> = (0..15).map(|i| 1.0 / (1.0 + i as f64)).collect();
    let eps = 0.5;
    let bound = eps * eps * numeric::norm2(&a).powi(2) * numeric::norm2(&b).powi(2);
    let errs: Vec<f64> = run_trials(53, 3000, |_, seed| {
        let (x, y) = outer_product_estimate(&a, &b, eps, seed).unwrap();
        let mut e = 0.0;
        for i in 0..a.len() {
            for j in 0..b.len() {
                e += (x[i] * y[j] - a[i] * b[j]).powi(2);
            }
        }
        e
    });
    let st = MeanSe::of(&errs);
    assert!(st.mean <= bound + 4.0 * st.se, "{} vs {bound}", st.mean);
}

#[test]
fn hybrid_error_meets_eps_used_in_most_trials() {
    let a = DenseMatrix::random_gaussian(32, 32, 54);
    let sigma = numsparse::oracle::spectral_norm(&a).unwrap();
    let eps = 0.4;
    let sp = HybridSparsifier::new(&a, &SampleConfig::new(eps, 0.25, 55)).unwrap();
    let ok = run_trials(56, 200, |_, seed| spectral_distance(&a, &sp.sample(seed)).unwrap() <= eps * sigma);
    assert!(success_fraction(&ok) >= 0.9);
}

#[test]
fn empirical_success_spread_matches_binomial_se() {
    // 40 batches of 100 Bernoulli(0.9) outcomes from a sampler-driven event
    let batches: Vec<f64> = (0..40)
        .map(|b| {
            let outcomes = run_trials(57 + b, 100, |_, seed| numsparse::rng::Seed::new(seed).uniform_at(0, 0) < 0.9);
            success_fraction(&outcomes)
        })
        .collect();
    let st = MeanSe::of(&batches);
    let sd = st.se * (batches.len() as f64).sqrt();
    let predicted = binomial_se(0.9, 100);
    assert!((sd / predicted - 1.0).abs() < 0.4, "sd {sd} vs {predicted}");
}
