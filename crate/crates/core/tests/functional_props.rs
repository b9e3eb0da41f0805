//! Invariants of the discovery functional along simulated trajectories.

use pdp_entropy::entropy::{weighted_global_max, PosteriorEntropy};
use pdp_entropy::functionals::{functional_a_from_entropies, xlogx};
use pdp_entropy::general_entropy::{weighted_general_entropy, weighted_general_max};
use pdp_entropy::special_fn::digamma_unchecked as psi;
use pdp_entropy::*;
use proptest::prelude::*;

fn arb_params() -> impl Strategy<Value = PdpParams> {
    (0.0f64..0.95, 0.01f64..15.0).prop_map(|(a, shift)| PdpParams::new(a, -a + shift).unwrap())
}

fn mle_weighted(s: &SampleState) -> f64 {
    if s.ell() == 0 {
        0.0
    } else {
        s.ell() as f64 * mle_entropy(s).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn functional_is_monotone_and_flat_at_discoveries(p in arb_params(), seed in any::<u64>()) {
        let mut eval = PosteriorEntropy::new(p);
        let floor = psi(2.0 - p.alpha()) - psi(1.0 - p.alpha());
        let mut prev = SampleState::empty();
        let mut prev_weighted = eval.weighted(&prev);
        let mut prev_a = 0.0;
        let mut rng = RngSeed::new(seed, 0).rng();
        for _ in 0..400 {
            let mut next = prev.clone();
            next.advance(&p, &mut rng);
            let v = delta_step(&prev, &next, &p).unwrap();
            let next_weighted = eval.weighted(&next);

            // Δ from weighted entropy and weighted maxima
            let ell = prev.ell();
            let long_delta = (weighted_global_max(ell + 1, &p) - next_weighted)
                - (weighted_global_max(ell, &p) - prev_weighted);
            prop_assert!((long_delta - v.delta).abs() <= 1e-10, "{long_delta} vs {}", v.delta);
            let long_eta = next_weighted - prev_weighted;
            prop_assert!((long_eta - v.eta).abs() <= 1e-10);
            prop_assert!(v.eta > 0.0);

            if next.is_discovery() {
                prop_assert!(v.is_discovery && v.delta.abs() < 1e-12);
            } else {
                prop_assert!(!v.is_discovery && v.delta >= floor - 1e-10);
            }
            prop_assert!(v.a_value >= prev_a - 1e-10);
            prop_assert!((v.a_value - prev_a - v.delta).abs() <= 1e-10);

            let d = max_entropy_weighted_step(ell, &p).bayes;
            prop_assert!((v.delta + v.eta - d).abs() <= 1e-12);

            let (lo, hi) = eta_bounds(ell, v.updated_count, &p);
            prop_assert!(lo <= v.eta + 1e-12 && v.eta <= hi + 1e-12);

            // frequentist counterpart
            let long_df = frequentist_functional(&next) - frequentist_functional(&prev);
            prop_assert!((long_df - v.delta_f).abs() <= 1e-10);
            prop_assert!(v.delta_f >= 0.0 && (v.delta_f == 0.0) == v.is_discovery);
            let wstep = frequentist_weighted_entropy_step(&prev, &next).unwrap();
            prop_assert!((wstep - (mle_weighted(&next) - mle_weighted(&prev))).abs() <= 1e-10);
            prop_assert!(wstep >= -1e-12);

            prev = next;
            prev_weighted = next_weighted;
            prev_a = v.a_value;
        }
    }

    #[test]
    fn frequentist_functional_matches_definition(counts in prop::collection::vec(1u64..100, 1..40)) {
        let s = SampleState::from_counts(counts).unwrap();
        let l = s.ell() as f64;
        let def = l * (l.ln() - mle_entropy(&s).unwrap());
        prop_assert!((frequentist_functional(&s) - def).abs() <= 1e-9 * (1.0 + def.abs()));
    }

    #[test]
    fn decomposition_identities(p in arb_params(), seed in any::<u64>(), len in 1u64..600) {
        let traj = simulate_trajectory(&p, len, &mut RngSeed::new(seed, 1).rng()).unwrap();
        let d = discovery_decomposition(&traj, &p).unwrap();
        let last = traj.last().unwrap();
        prop_assert!((d.weighted_entropy() - weighted_posterior_entropy(last, &p)).abs() <= 1e-9);
        prop_assert!((d.functional_a() - functional_a(last, &p)).abs() <= 1e-9);
        prop_assert!(d.reinforcement_rewards.iter().all(|&r| r >= 0.0));
        prop_assert!((functional_a(last, &p) - functional_a_from_entropies(last, &p)).abs() <= 1e-9);
    }

    #[test]
    fn general_spec_specializes(p in arb_params(), counts in prop::collection::vec(1u64..60, 1..30)) {
        let s = SampleState::from_counts(counts).unwrap();
        let freq = GeneralEntropySpec::frequentist();
        let pdp = GeneralEntropySpec::pdp(&p);
        prop_assert!((general_entropy(&freq, &s).unwrap() - mle_entropy(&s).unwrap()).abs() <= 1e-12);
        prop_assert!((general_entropy(&pdp, &s).unwrap() - posterior_mean_entropy(&s, &p)).abs() <= 1e-10);
        // general maxima agree with the specialized ones
        let l = s.ell();
        prop_assert!((weighted_general_max(&pdp, l) - weighted_global_max(l, &p)).abs() <= 1e-10);
        prop_assert!((weighted_general_max(&freq, l) - xlogx(l as f64)).abs() <= 1e-10 * (1.0 + xlogx(l as f64)));
    }

    #[test]
    fn general_steps_match_specialized(p in arb_params(), seed in any::<u64>()) {
        let freq = GeneralEntropySpec::frequentist();
        let pdp = GeneralEntropySpec::pdp(&p);
        let mut rng = RngSeed::new(seed, 2).rng();
        let mut prev = SampleState::empty();
        let (mut cum_f, mut cum_p) = (0.0, 0.0);
        for _ in 0..200 {
            let mut next = prev.clone();
            next.advance(&p, &mut rng);
            let v = delta_step(&prev, &next, &p).unwrap();

            let gf = general_delta(&freq, &prev, &next).unwrap();
            let gp = general_delta(&pdp, &prev, &next).unwrap();
            prop_assert!((gf - v.delta_f).abs() <= 1e-10);
            prop_assert!((gp - v.delta).abs() <= 1e-10);

            for (spec, g) in [(&freq, gf), (&pdp, gp)] {
                let gap = |s: &SampleState| weighted_general_max(spec, s.ell()) - weighted_general_entropy(spec, s);
                prop_assert!((gap(&next) - gap(&prev) - g).abs() <= 1e-9);
            }
            prop_assert!(gf >= 0.0 && gp >= 0.0);
            prop_assert_eq!(gf == 0.0, next.is_discovery());
            prop_assert_eq!(gp == 0.0, next.is_discovery());
            cum_f += gf;
            cum_p += gp;
            let _ = (cum_f, cum_p);

            let wf = general_weighted_entropy_step(&freq, &prev, &next).unwrap();
            let wp = general_weighted_entropy_step(&pdp, &prev, &next).unwrap();
            prop_assert!((wf - frequentist_weighted_entropy_step(&prev, &next).unwrap()).abs() <= 1e-10);
            prop_assert!((wp - v.eta).abs() <= 1e-9);
            prop_assert!(wf >= -1e-12 && wp > 0.0);

            prev = next;
        }
    }
}

/// Moving one observation from a class of size n to one of size m with
/// m + 1 ≤ n never lowers the entropy; checked over all compositions of ℓ ≤ 10.
#[test]
fn exchange_never_decreases_general_entropy() {
    fn compositions(ell: u64) -> Vec<Vec<u64>> {
        if ell == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for first in 1..=ell {
            for mut rest in compositions(ell - first) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
        out
    }
    let p = PdpParams::new(0.4, 0.3).unwrap();
    for spec in [GeneralEntropySpec::frequentist(), GeneralEntropySpec::pdp(&p)] {
        for ell in 2..=10 {
            for c in compositions(ell) {
                let before = weighted_general_entropy(&spec, &SampleState::from_counts(c.clone()).unwrap());
                for i in 0..c.len() {
                    for j in 0..c.len() {
                        if i == j || c[i] < 2 || c[j] + 1 > c[i] {
                            continue;
                        }
                        let mut moved = c.clone();
                        moved[i] -= 1;
                        moved[j] += 1;
                        let after = weighted_general_entropy(&spec, &SampleState::from_counts(moved).unwrap());
                        assert!(after >= before - 1e-10, "{} {c:?} {i}->{j}", spec.name);
                    }
                }
            }
        }
    }
}

#[test]
fn cumulative_general_delta_is_flat_exactly_at_discoveries() {
    let p = PdpParams::new(0.5, 1.0).unwrap();
    let traj = simulate_trajectory(&p, 2000, &mut RngSeed::new(77, 0).rng()).unwrap();
    for spec in [GeneralEntropySpec::frequentist(), GeneralEntropySpec::pdp(&p)] {
        let mut cum = 0.0;
        let mut prev = SampleState::empty();
        for next in &traj {
            let d = general_delta(&spec, &prev, next).unwrap();
            let new_cum = cum + d;
            assert!(new_cum >= cum);
            assert_eq!(new_cum == cum, next.is_discovery());
            cum = new_cum;
            prev = next.clone();
        }
    }
}

#[test]
fn kappa_bounds() {
    for ell in 1..=100_000u64 {
        let l = ell as f64;
        let gap = kappa(ell + 1) - (l.ln() + 1.0);
        assert!(gap >= 1.0 / (2.0 * l) - 1.0 / (2.0 * l * l) - 1e-12, "lower at {ell}");
        assert!(gap <= 1.0 / l + 1e-12, "upper at {ell}");
    }
}
