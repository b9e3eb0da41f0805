use pdp_entropy::{
    predictive_probabilities, sample_gem_weights, simulate_trajectory, simulate_transitions, step, PdpParams, RngSeed,
    SampleState,
};
use proptest::prelude::*;

fn params(alpha: f64, theta: f64) -> PdpParams {
    PdpParams::new(alpha, theta).unwrap()
}

#[test]
fn discovery_frequency_matches_predictive_rule() {
    let p = params(0.0, 1.0);
    let s = SampleState::from_counts(vec![2, 1]).unwrap();
    let mut rng = RngSeed::new(2024, 0).rng();
    let draws = 1_000_000u32;
    let mut hits = 0u32;
    let mut next = s.clone();
    for _ in 0..draws {
        next.clone_from(&s);
        if next.advance(&p, &mut rng).is_discovery() {
            hits += 1;
        }
    }
    let freq = hits as f64 / draws as f64;
    let sigma = (0.25f64 * 0.75 / draws as f64).sqrt();
    assert!((freq - 0.25).abs() <= 3.0 * sigma, "frequency {freq}");
}

#[test]
fn existing_species_frequencies_match() {
    let p = params(0.5, 0.5);
    let s = SampleState::from_counts(vec![3, 1]).unwrap();
    let pred = predictive_probabilities(&s, &p).unwrap();
    let mut rng = RngSeed::new(99, 3).rng();
    let draws = 400_000usize;
    let mut hist = [0usize; 3];
    for _ in 0..draws {
        let next = step(&s, &p, &mut rng);
        hist[next.last_species().unwrap()] += 1;
    }
    let probs = [pred.existing[0], pred.existing[1], pred.new_species];
    for (h, q) in hist.iter().zip(probs) {
        let f = *h as f64 / draws as f64;
        let sigma = (q * (1.0 - q) / draws as f64).sqrt();
        assert!((f - q).abs() <= 4.0 * sigma, "{f} vs {q}");
    }
}

#[test]
fn dirichlet_process_species_grow_logarithmically() {
    let p = params(0.0, 1.0);
    let length = 10_000;
    let mut mean_k = 0.0;
    for r in 0..100 {
        let end = simulate_transitions(&p, length, &mut RngSeed::new(17, r).rng(), |_, _| {});
        let k = end.k() as f64;
        let log_l = (length as f64).ln();
        assert!(k >= 0.3 * log_l && k <= 3.0 * log_l, "replica {r}: k = {k}");
        mean_k += k / 100.0;
    }
    // E[K_ℓ] = Σ_{i<ℓ} θ/(θ+i) ≈ 9.79 for θ = 1, ℓ = 10^4
    assert!((mean_k - 9.79).abs() < 1.0, "mean k = {mean_k}");
}

#[test]
fn discounted_process_species_are_sublinear() {
    let p = params(0.5, 0.5);
    let length = 10_000;
    let mean_ratio: f64 = (0..100)
        .map(|r| {
            let end = simulate_transitions(&p, length, &mut RngSeed::new(23, r).rng(), |_, _| {});
            end.k() as f64 / length as f64
        })
        .sum::<f64>()
        / 100.0;
    assert!(mean_ratio < 0.2, "mean K/ell = {mean_ratio}");
}

fn beta_mean_check(p: PdpParams, expected: f64, seed: u64) {
    let n = 20_000;
    let mut rng = RngSeed::new(seed, 0).rng();
    let firsts: Vec<f64> = (0..n)
        .map(|_| sample_gem_weights(&p, 1, &mut rng).unwrap().weights[0])
        .collect();
    let mean = firsts.iter().sum::<f64>() / n as f64;
    let var = firsts.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let se = (var / n as f64).sqrt();
    assert!(
        (mean - expected).abs() <= 3.0 * se,
        "mean {mean} vs {expected} (se {se})"
    );
}

#[test]
fn gem_first_weight_means() {
    beta_mean_check(params(0.0, 1.0), 0.5, 5);
    beta_mean_check(params(0.5, 0.5), 1.0 / 3.0, 6);
}

#[test]
fn gem_remainder_shrinks_with_truncation() {
    let p = params(0.5, 0.5);
    let median_remainder = |t: usize, seed: u64| {
        let mut rng = RngSeed::new(seed, 0).rng();
        let mut r: Vec<f64> = (0..201)
            .map(|_| sample_gem_weights(&p, t, &mut rng).unwrap().remainder)
            .collect();
        r.sort_by(f64::total_cmp);
        r[100]
    };
    assert!(median_remainder(100, 1) > median_remainder(10_000, 2));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn predictive_is_a_distribution(
        alpha in 0.0f64..0.99,
        shift in 1e-3f64..20.0,
        counts in prop::collection::vec(1u64..50, 0..30),
    ) {
        let p = PdpParams::new(alpha, -alpha + shift).unwrap();
        let s = SampleState::from_counts(counts).unwrap();
        let pred = predictive_probabilities(&s, &p).unwrap();
        prop_assert!(pred.new_species >= 0.0);
        prop_assert!(pred.existing.iter().all(|&q| q >= 0.0));
        let total = pred.new_species + pred.existing.iter().sum::<f64>();
        prop_assert!((total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn one_count_changes_by_one(
        alpha in 0.0f64..0.99,
        shift in 1e-3f64..20.0,
        seed in any::<u64>(),
        len in 1u64..200,
    ) {
        let p = PdpParams::new(alpha, -alpha + shift).unwrap();
        let traj = simulate_trajectory(&p, len, &mut RngSeed::new(seed, 0).rng()).unwrap();
        let mut prev = SampleState::empty();
        for next in &traj {
            next.validate().unwrap();
            let t = next.transition_from(&prev).unwrap();
            prop_assert_eq!(next.ell(), prev.ell() + 1);
            prop_assert_eq!(next.is_discovery(), next.k() == prev.k() + 1);
            prop_assert_eq!(next.is_discovery(), next.last_count() == Some(1));
            prop_assert_eq!(t.count_after(), next.last_count().unwrap());
            prev = next.clone();
        }
    }

    #[test]
    fn gem_is_probability_vector(alpha in 0.0f64..0.95, shift in 0.05f64..10.0, seed in any::<u64>()) {
        let p = PdpParams::new(alpha, -alpha + shift).unwrap();
        let w = sample_gem_weights(&p, 500, &mut RngSeed::new(seed, 0).rng()).unwrap();
        prop_assert!(w.weights.iter().all(|&x| (0.0..=1.0).contains(&x)));
        prop_assert!((0.0..1.0).contains(&w.remainder) || w.weights.is_empty());
        prop_assert!((w.total_mass() - 1.0).abs() <= 1e-12);
    }
}
