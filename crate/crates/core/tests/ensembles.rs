//! Monte Carlo checks of the sampled ensembles against independent
//! oracles and the analytic laws.

mod common;

use haarstat::marginals::all_conditional_slices;
use haarstat::xeb::{accumulate_full, accumulate_subsystem, XebAccumulator};
use haarstat::{
    conditional_slice, depolarize, draw_samples, ks_one_sample, ks_two_sample, marginalize,
    noisy_conditional_affine, noisy_conditional_exact, probabilities, sample_flat_dirichlet,
    sample_haar_state, AnalyticLaw, BitStringProbs, Partition, ProbVector, RngSpec, XebKind,
};

fn haar(n: u32, seed: u64, trial: u64) -> ProbVector {
    probabilities(&sample_haar_state(n, RngSpec::new(seed, trial)).unwrap())
}

#[test]
fn haar_probabilities_match_dirichlet_oracle() {
    let dim = 4096;
    let ours: Vec<f64> = (0..25).flat_map(|t| haar(12, 11, t).into_vec()).collect();
    let mut rng = common::oracle_rng(12);
    let oracle: Vec<f64> = (0..25)
        .flat_map(|_| common::dirichlet(&mut rng, dim, 1.0))
        .collect();
    let r = ks_two_sample(&ours, &oracle).unwrap();
    assert!(r.passed, "D = {} vs {}", r.ks_statistic, r.ks_critical_1pct);
}

#[test]
fn flat_dirichlet_sampler_matches_full_law() {
    let values: Vec<f64> = (0..40)
        .flat_map(|t| {
            sample_flat_dirichlet(2048, RngSpec::new(13, t))
                .unwrap()
                .into_vec()
        })
        .collect();
    let law = AnalyticLaw::full_beta(2048).unwrap().with_scaled(false);
    assert!(ks_one_sample(&values, &law).unwrap().passed);
}

#[test]
fn arbitrary_partitions_follow_subsystem_and_conditional_laws() {
    // Non-leading A bits exercise the general split/join path.
    let part = Partition::new(10, vec![1, 4, 6, 9]).unwrap();
    let mut marg = Vec::new();
    let mut cond = Vec::new();
    for t in 0..3000 {
        let p = haar(10, 14, t);
        marg.extend(marginalize(&p, &part).unwrap());
        cond.extend(conditional_slice(&p, &part, 37).unwrap().cond_probs);
    }
    let sub = AnalyticLaw::subsystem_beta(1024, 16)
        .unwrap()
        .with_scaled(false);
    let con = AnalyticLaw::conditional_beta(16)
        .unwrap()
        .with_scaled(false);
    let r = ks_one_sample(&marg, &sub).unwrap();
    assert!(r.passed, "marginal D = {}", r.ks_statistic);
    let r = ks_one_sample(&cond, &con).unwrap();
    assert!(r.passed, "conditional D = {}", r.ks_statistic);
}

#[test]
fn every_conditional_slice_is_flat_dirichlet() {
    let part = Partition::leading(10, 3).unwrap();
    let mut pooled = Vec::new();
    for t in 0..100 {
        for s in all_conditional_slices(&haar(10, 15, t), &part) {
            pooled.extend(s.unwrap().cond_probs);
        }
    }
    let law = AnalyticLaw::conditional_beta(8).unwrap().with_scaled(false);
    assert!(ks_one_sample(&pooled, &law).unwrap().passed);
}

#[test]
fn subsystem_cdf_small_system() {
    // N = 8, K = 2: p_A(y) ~ Beta(2, 6).
    let part = Partition::leading(3, 2).unwrap();
    let values: Vec<f64> = (0..20_000)
        .flat_map(|t| marginalize(&haar(3, 16, t), &part).unwrap())
        .collect();
    let law = AnalyticLaw::subsystem_beta(8, 4)
        .unwrap()
        .with_scaled(false);
    let r = ks_one_sample(&values, &law).unwrap();
    assert!(r.passed, "D = {}", r.ks_statistic);
    // I_x(2, 6) = P(Bin(7, x) >= 2).
    let exact = |x: f64| {
        let y = 1.0 - x;
        1.0 - y.powi(7) - 7.0 * x * y.powi(6)
    };
    for x in [0.05, 0.15, 0.3, 0.5] {
        let emp = values.iter().filter(|&&v| v <= x).count() as f64 / values.len() as f64;
        assert!(
            (emp - exact(x)).abs() < 0.01,
            "x={x}: {emp} vs {}",
            exact(x)
        );
        assert!((law.cdf(x) - exact(x)).abs() < 1e-12);
    }
}

#[test]
fn affine_noisy_conditional_tracks_exact() {
    let part = Partition::leading(12, 8).unwrap();
    let lambda = 0.3;
    let mut exact = Vec::new();
    let mut affine = Vec::new();
    for t in 0..400 {
        let p = haar(12, 17, t);
        let noisy = depolarize(&p, lambda).unwrap();
        exact.extend(
            noisy_conditional_exact(&noisy, &part, 0)
                .unwrap()
                .cond_probs,
        );
        let ideal = conditional_slice(&p, &part, 0).unwrap();
        affine.extend(noisy_conditional_affine(&ideal, lambda).unwrap());
    }
    let r = ks_two_sample(&exact, &affine).unwrap();
    assert!(r.ks_statistic < 0.02, "D = {}", r.ks_statistic);
}

#[test]
fn full_xeb_oracle_small_system() {
    // Self-sampled XEB over Haar states at N = 16 against the Dirichlet
    // oracle and the closed form (N-1)/(N+1).
    let (oracle, se) = common::dirichlet_xeb_oracle(21, 16, 16, 400_000);
    assert!((oracle - 15.0 / 17.0).abs() < 4.0 * se, "{oracle} +/- {se}");
    let mut acc = XebAccumulator::new(XebKind::Full, 4);
    for t in 0..100_000 {
        let p = haar(4, 22, t);
        let s = draw_samples(&p, 4, RngSpec::new(23, t)).unwrap();
        acc.merge(&accumulate_full(&s, &p).unwrap());
    }
    let r = acc.result();
    assert!(
        (r.fidelity - 15.0 / 17.0).abs() < 4.0 * r.std_error,
        "{r:?}"
    );
}

#[test]
fn subsystem_xeb_oracle() {
    // n = 8, m = 4: expected (M-1)/(N+1) = 15/257.
    let target = 15.0 / 257.0;
    let (oracle, se) = common::dirichlet_xeb_oracle(24, 256, 16, 200_000);
    assert!((oracle - target).abs() < 4.0 * se, "{oracle} +/- {se}");
    let part = Partition::leading(8, 4).unwrap();
    let mut acc = XebAccumulator::new(XebKind::Subsystem, 4);
    for t in 0..40_000 {
        let p = haar(8, 25, t);
        let s = draw_samples(&p, 16, RngSpec::new(26, t)).unwrap();
        acc.merge(&accumulate_subsystem(&s, &p, &part).unwrap());
    }
    let r = acc.result();
    assert!((r.fidelity - target).abs() < 4.0 * r.std_error, "{r:?}");
}

#[test]
fn depolarized_sampling_scales_xeb() {
    let lambda = 0.52;
    let mut acc = XebAccumulator::new(XebKind::Full, 6);
    for t in 0..40_000 {
        let p = haar(6, 27, t);
        let noisy = depolarize(&p, lambda).unwrap();
        let s = draw_samples(&noisy, 8, RngSpec::new(28, t)).unwrap();
        acc.merge(&accumulate_full(&s, &p).unwrap());
    }
    let r = acc.result();
    let target = (1.0 - lambda) * 63.0 / 65.0;
    assert!((r.fidelity - target).abs() < 4.0 * r.std_error, "{r:?}");
}

#[test]
fn depolarized_vector_is_normalized_mixture() {
    let p = haar(10, 29, 0);
    let noisy = depolarize(&p, 0.3).unwrap();
    let dense = noisy.to_prob_vector();
    let total: f64 = dense.probs().iter().sum();
    assert!((total - 1.0).abs() < 1e-12);
    for (q, r) in p.probs().iter().zip(noisy.probs()) {
        assert!((0.7 * q + 0.3 / 1024.0 - r).abs() < 1e-15);
    }
}
