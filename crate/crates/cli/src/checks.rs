//! The verification checks behind `verify`. Each returns a [`CheckResult`]
//! carrying the worst discrepancy seen and the first failing case.

use std::time::Instant;

use pdp_entropy::entropy::weighted_global_max;
use pdp_entropy::functionals::{delta_closed_form, eta_closed_form};
use pdp_entropy::general_entropy::DEFAULT_GRID;
use pdp_entropy::special_fn::digamma_unchecked as psi;
use pdp_entropy::{
    check_admissibility, digamma, digamma_log_bounds, eta_bounds, extremal_config, frequentist_functional,
    general_delta, general_entropy, global_max_entropy, global_min_entropy, kappa, max_entropy_weighted_step,
    mle_entropy, posterior_mean_entropy, DiscoveryDecomposition, ExtremeKind, GeneralEntropySpec, PdpParams,
    PosteriorEntropy, RngSeed, SampleState,
};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::commands::prior_mc::prior_mc;
use crate::error::CliResult;

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Number of individual comparisons made.
    pub evaluated: u64,
    pub failures: u64,
    /// Largest discrepancy seen, for checks that compare two numbers.
    pub max_error: Option<f64>,
    pub first_failure: Option<String>,
    /// Free-form summary, e.g. the Monte Carlo estimate.
    pub note: Option<String>,
    pub seconds: f64,
}

impl CheckResult {
    pub fn with_note(mut self, note: String) -> Self {
        self.note = Some(note);
        self
    }
}

/// Running count for one check; merges in input order so the first failure
/// is reproducible under parallel evaluation.
#[derive(Debug, Clone, Default)]
pub struct Tally {
    evaluated: u64,
    failures: u64,
    max_error: Option<f64>,
    first_failure: Option<String>,
}

impl Tally {
    pub fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.evaluated += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(describe());
            }
        }
    }

    /// `|error| ≤ tol`, tracking the largest error.
    pub fn close(&mut self, error: f64, tol: f64, describe: impl FnOnce() -> String) {
        let e = error.abs();
        self.max_error = Some(self.max_error.map_or(e, |m| m.max(e)));
        self.check(e <= tol, describe);
    }

    pub fn merge(mut self, other: Tally) -> Tally {
        self.evaluated += other.evaluated;
        self.failures += other.failures;
        self.max_error = match (self.max_error, other.max_error) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        self.first_failure = self.first_failure.or(other.first_failure);
        self
    }

    pub fn finish(self, name: &str, started: Instant) -> CheckResult {
        CheckResult {
            name: name.to_string(),
            passed: self.failures == 0 && self.evaluated > 0,
            evaluated: self.evaluated,
            failures: self.failures,
            max_error: self.max_error,
            first_failure: self
                .first_failure
                .or_else(|| (self.evaluated == 0).then(|| "nothing was evaluated".to_string())),
            note: None,
            seconds: started.elapsed().as_secs_f64(),
        }
    }
}

/// Distinct, reproducible seed for each part of a campaign.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

pub fn params_list(grid: &[(f64, f64)]) -> CliResult<Vec<PdpParams>> {
    grid.iter()
        .map(|&(a, t)| PdpParams::new(a, t).map_err(Into::into))
        .collect()
}

/// Tolerances of the trajectory campaign.
pub mod tol {
    pub const DELTA_SIGN: f64 = 1e-12;
    pub const DELTA_DISCOVERY: f64 = 1e-12;
    pub const TWO_WAYS: f64 = 1e-10;
    pub const ADDITIVITY: f64 = 1e-12;
    pub const DECOMPOSITION: f64 = 1e-9;
    pub const BRUTE_FORCE: f64 = 1e-9;
    pub const GLOBAL_EXTREMES: f64 = 1e-10;
    pub const GENERAL: f64 = 1e-10;
}

pub const TRAJECTORY_CHECKS: [&str; 11] = [
    "delta_nonnegative",
    "delta_two_ways",
    "delta_discovery_structure",
    "eta_identity",
    "eta_positive",
    "eta_bounds",
    "max_step_identity",
    "decomposition",
    "frequentist_delta",
    "frequentist_weighted_step",
    "general_delta",
];

#[derive(Debug, Clone, Default)]
struct TrajectoryTallies([Tally; TRAJECTORY_CHECKS.len()]);

impl TrajectoryTallies {
    fn merge(self, other: Self) -> Self {
        let mut out = self.0;
        for (a, b) in out.iter_mut().zip(other.0) {
            *a = std::mem::take(a).merge(b);
        }
        TrajectoryTallies(out)
    }
}

/// Runs one trajectory and compares every closed form with its definition.
fn check_trajectory(params: &PdpParams, length: u64, seed: u64, stream: u64, with_general: bool) -> TrajectoryTallies {
    let mut tallies = TrajectoryTallies::default();
    let [t_sign, t_two, t_disc, t_eta, t_eta_pos, t_eta_bd, t_max, t_dec, t_fd, t_fw, t_gen] = &mut tallies.0;
    let (alpha, theta) = (params.alpha(), params.theta());
    let floor = psi(2.0 - alpha) - psi(1.0 - alpha);
    let general = with_general.then(|| (GeneralEntropySpec::frequentist(), GeneralEntropySpec::pdp(params)));
    let ctx = |ell: u64| format!("alpha={alpha} theta={theta} stream={stream} ell={ell}");

    let mut rng = RngSeed::new(seed, stream).rng();
    let mut eval = PosteriorEntropy::new(*params);
    let mut state = SampleState::empty();
    let mut weighted = eval.weighted(&state);
    let mut weighted_max = weighted_global_max(0, params);
    let mut a_f = 0.0;
    let mut mle_weighted = 0.0;
    let mut n_star = Vec::with_capacity(length as usize);

    for _ in 0..length {
        let prev = general.as_ref().map(|_| state.clone());
        let t = state.advance(params, &mut rng);
        let (ell_before, n) = (t.ell_before, t.count_after());
        let ell = state.ell();
        n_star.push(n);

        let delta = delta_closed_form(n, params);
        let eta = eta_closed_form(ell_before, n, params);
        let next_weighted = eval.weighted(&state);
        let next_weighted_max = weighted_global_max(ell, params);
        let long_delta = (next_weighted_max - next_weighted) - (weighted_max - weighted);
        let long_eta = next_weighted - weighted;

        t_sign.check(delta >= -tol::DELTA_SIGN, || format!("{}: delta={delta:e}", ctx(ell)));
        t_two.close(delta - long_delta, tol::TWO_WAYS, || {
            format!("{}: closed={delta:.17e} long={long_delta:.17e}", ctx(ell))
        });
        if n == 1 {
            t_disc.check(delta.abs() < tol::DELTA_DISCOVERY, || {
                format!("{}: discovery delta={delta:e}", ctx(ell))
            });
        } else {
            t_disc.check(delta >= floor - tol::TWO_WAYS, || {
                format!("{}: n*={n} delta={delta:.17e} floor={floor:.17e}", ctx(ell))
            });
        }
        t_eta.close(eta - long_eta, tol::TWO_WAYS, || {
            format!("{}: closed={eta:.17e} long={long_eta:.17e}", ctx(ell))
        });
        t_eta_pos.check(eta > 0.0 && long_eta > 0.0, || {
            format!("{}: closed={eta:e} long={long_eta:e}", ctx(ell))
        });
        let (lo, hi) = eta_bounds(ell_before, n, params);
        t_eta_bd.check(lo <= eta + 1e-12 && eta <= hi + 1e-12, || {
            format!("{}: eta={eta:.17e} bounds=[{lo:.17e}, {hi:.17e}]", ctx(ell))
        });
        let d = max_entropy_weighted_step(ell_before, params).bayes;
        t_max.close(delta + eta - d, tol::ADDITIVITY, || {
            format!("{}: delta+eta={:.17e} d={d:.17e}", ctx(ell), delta + eta)
        });
        let long_d = next_weighted_max - weighted_max;
        t_max.close(long_d - d, tol::TWO_WAYS, || {
            format!("{}: d={d:.17e} from maxima={long_d:.17e}", ctx(ell))
        });

        // frequentist counterparts
        let delta_f = kappa(n);
        let next_a_f = frequentist_functional(&state);
        t_fd.close(delta_f - (next_a_f - a_f), tol::TWO_WAYS, || {
            format!("{}: closed={delta_f:.17e} long={:.17e}", ctx(ell), next_a_f - a_f)
        });
        let step_f = kappa(ell) - delta_f;
        let next_mle_weighted = ell as f64 * mle_entropy(&state).expect("ell >= 1");
        t_fw.close(step_f - (next_mle_weighted - mle_weighted), tol::TWO_WAYS, || {
            format!(
                "{}: closed={step_f:.17e} long={:.17e}",
                ctx(ell),
                next_mle_weighted - mle_weighted
            )
        });
        if state.k() == 1 {
            t_fw.check(step_f.abs() <= 1e-12, || {
                format!("{}: single class, step={step_f:e}", ctx(ell))
            });
        } else {
            t_fw.check(step_f > 0.0, || {
                format!("{}: k={} step={step_f:e}", ctx(ell), state.k())
            });
        }

        if let (Some((freq, pdp)), Some(prev)) = (&general, &prev) {
            let gf = general_delta(freq, prev, &state).expect("successor");
            let gp = general_delta(pdp, prev, &state).expect("successor");
            t_gen.close(gf - delta_f, tol::GENERAL, || {
                format!("{}: general={gf:e} frequentist={delta_f:e}", ctx(ell))
            });
            t_gen.close(gp - delta, tol::GENERAL, || {
                format!("{}: general={gp:e} pdp={delta:e}", ctx(ell))
            });
        }

        weighted = next_weighted;
        weighted_max = next_weighted_max;
        a_f = next_a_f;
        mle_weighted = next_mle_weighted;
    }

    if length > 0 {
        let dec = DiscoveryDecomposition::from_frequencies(&n_star, params).expect("positive frequencies");
        let ell = state.ell();
        let a_def = weighted_max - weighted;
        t_dec.close(dec.weighted_entropy() - weighted, tol::DECOMPOSITION, || {
            format!(
                "{}: telescoped={:.17e} direct={weighted:.17e}",
                ctx(ell),
                dec.weighted_entropy()
            )
        });
        t_dec.close(dec.functional_a() - a_def, tol::DECOMPOSITION, || {
            format!("{}: rewards={:.17e} A={a_def:.17e}", ctx(ell), dec.functional_a())
        });
    }
    tallies
}

/// Trajectory checks over `replicas` trajectories per grid cell. General
/// framework increments are compared on the first `general_replicas` of each
/// cell.
pub fn trajectory_campaign(
    grid: &[PdpParams],
    replicas: u64,
    length: u64,
    seed: u64,
    general_replicas: u64,
) -> Vec<CheckResult> {
    let started = Instant::now();
    let jobs: Vec<(usize, u64)> = (0..grid.len())
        .flat_map(|c| (0..replicas).map(move |r| (c, r)))
        .collect();
    let tallies = jobs
        .par_iter()
        .map(|&(c, r)| check_trajectory(&grid[c], length, seed, c as u64 * replicas + r, r < general_replicas))
        .reduce(TrajectoryTallies::default, TrajectoryTallies::merge);
    let mut out: Vec<CheckResult> = TRAJECTORY_CHECKS
        .iter()
        .zip(tallies.0)
        .map(|(name, t)| t.finish(name, started))
        .collect();
    // a single timing for the whole pass
    let secs = started.elapsed().as_secs_f64();
    out.iter_mut().for_each(|c| c.seconds = secs);
    out
}

/// The frequentist weighted step on a trajectory that never leaves one class.
pub fn single_class_trajectory(length: u64) -> CheckResult {
    let started = Instant::now();
    let mut t = Tally::default();
    let mut state = SampleState::empty();
    let mut prev = 0.0;
    for _ in 0..length {
        state.observe(0).expect("species 0 always observable");
        let ell = state.ell();
        let weighted = ell as f64 * mle_entropy(&state).expect("ell >= 1");
        let step = kappa(ell) - kappa(state.counts()[0]);
        t.check(step == 0.0 && weighted - prev == 0.0, || {
            format!("ell={ell}: step={step:e} long={:e}", weighted - prev)
        });
        prev = weighted;
    }
    t.finish("frequentist_single_class", started)
}

/// 1/(2ℓ) − 1/(2ℓ²) ≤ κ(ℓ+1) − (log ℓ + 1) ≤ 1/ℓ.
pub fn kappa_bounds(max_ell: u64) -> CheckResult {
    let started = Instant::now();
    let mut t = Tally::default();
    for ell in 1..=max_ell {
        let l = ell as f64;
        let gap = kappa(ell + 1) - (l.ln() + 1.0);
        let (lo, hi) = (0.5 / l - 0.5 / (l * l), 1.0 / l);
        t.check(lo <= gap + 1e-12 && gap <= hi + 1e-12, || {
            format!("ell={ell}: gap={gap:.17e} bounds=[{lo:.17e}, {hi:.17e}]")
        });
    }
    t.finish("kappa_bounds", started)
}

/// All compositions of `ell` into `k` positive parts, passed to `visit`.
pub fn for_each_composition(ell: u64, k: usize, visit: &mut impl FnMut(&[u64])) {
    fn go(rest: u64, parts: usize, buf: &mut Vec<u64>, visit: &mut impl FnMut(&[u64])) {
        if parts == 1 {
            buf.push(rest);
            visit(buf);
            buf.pop();
            return;
        }
        for first in 1..=rest - (parts as u64 - 1) {
            buf.push(first);
            go(rest - first, parts - 1, buf, visit);
            buf.pop();
        }
    }
    if k == 0 || k as u64 > ell {
        return;
    }
    go(ell, k, &mut Vec::with_capacity(k), visit);
}

fn sorted(v: &[u64]) -> Vec<u64> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v
}

/// Exhaustive check of the fixed-k extremal configurations for ℓ ≤ `max_ell`.
pub fn brute_force_extremes(grid: &[PdpParams], max_ell: u64) -> Vec<CheckResult> {
    let started = Instant::now();
    let per_cell: Vec<(Tally, Tally)> = grid
        .par_iter()
        .map(|p| {
            let mut ext = Tally::default();
            let mut glob = Tally::default();
            let ctx = |ell: u64, k: usize| format!("alpha={} theta={} ell={ell} k={k}", p.alpha(), p.theta());
            for ell in 1..=max_ell {
                let (mut prev_max, mut prev_min) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
                let mut overall = (f64::NEG_INFINITY, f64::INFINITY);
                for k in 1..=ell as usize {
                    let mut all: Vec<(Vec<u64>, f64)> = Vec::new();
                    for_each_composition(ell, k, &mut |c| {
                        let h = posterior_mean_entropy(&SampleState::from_counts(c.to_vec()).expect("positive"), p);
                        all.push((c.to_vec(), h));
                    });
                    let max = all.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
                    let min = all.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
                    let max_cfg = extremal_config(ell, k, ExtremeKind::Max).expect("1 <= k <= ell");
                    let min_cfg = extremal_config(ell, k, ExtremeKind::Min).expect("1 <= k <= ell");
                    let at_max = posterior_mean_entropy(&max_cfg.to_state(), p);
                    let at_min = posterior_mean_entropy(&min_cfg.to_state(), p);
                    ext.close(at_max - max, tol::BRUTE_FORCE, || {
                        format!("{}: balanced={at_max:.17e} enumerated max={max:.17e}", ctx(ell, k))
                    });
                    ext.close(at_min - min, tol::BRUTE_FORCE, || {
                        format!("{}: skewed={at_min:.17e} enumerated min={min:.17e}", ctx(ell, k))
                    });
                    for (c, h) in &all {
                        if *h > max - tol::BRUTE_FORCE {
                            ext.check(sorted(c) == sorted(&max_cfg.counts), || {
                                format!(
                                    "{}: {c:?} ties the maximum but is not {:?}",
                                    ctx(ell, k),
                                    max_cfg.counts
                                )
                            });
                        }
                        if *h < min + tol::BRUTE_FORCE {
                            ext.check(sorted(c) == sorted(&min_cfg.counts), || {
                                format!(
                                    "{}: {c:?} ties the minimum but is not {:?}",
                                    ctx(ell, k),
                                    min_cfg.counts
                                )
                            });
                        }
                    }
                    ext.check(max > prev_max && min > prev_min, || {
                        format!(
                            "{}: max {prev_max:.17e} -> {max:.17e}, min {prev_min:.17e} -> {min:.17e}",
                            ctx(ell, k)
                        )
                    });
                    prev_max = max;
                    prev_min = min;
                    overall = (overall.0.max(max), overall.1.min(min));
                }
                let (gmax, gmin) = (global_max_entropy(ell, p), global_min_entropy(ell, p));
                glob.close(gmax - overall.0, tol::GLOBAL_EXTREMES, || {
                    format!(
                        "{}: formula={gmax:.17e} enumerated={:.17e}",
                        ctx(ell, ell as usize),
                        overall.0
                    )
                });
                glob.close(gmin - overall.1, tol::GLOBAL_EXTREMES, || {
                    format!("{}: formula={gmin:.17e} enumerated={:.17e}", ctx(ell, 1), overall.1)
                });
            }
            (ext, glob)
        })
        .collect();
    let (mut ext, mut glob) = (Tally::default(), Tally::default());
    for (e, g) in per_cell {
        ext = ext.merge(e);
        glob = glob.merge(g);
    }
    vec![
        ext.finish("extremal_brute_force", started),
        glob.finish("global_extremes", started),
    ]
}

/// Prior mean Monte Carlo against ψ(θ+1) − ψ(1−α) within three standard errors.
pub fn prior_mean_check(
    params: &PdpParams,
    draws: u64,
    truncation: u64,
    seed: u64,
    max_median_remainder: Option<f64>,
) -> CliResult<CheckResult> {
    let started = Instant::now();
    let r = prior_mc(params, draws, truncation, seed)?;
    let mut t = Tally::default();
    t.close(r.mean - r.target, 3.0 * r.std_error, || {
        format!(
            "mean={:.6} target={:.6} se={:.6} z={:+.3}",
            r.mean, r.target, r.std_error, r.z_score
        )
    });
    if let Some(cap) = max_median_remainder {
        t.check(r.remainder_median < cap, || {
            format!("median remainder {:.3e} not below {cap:e}", r.remainder_median)
        });
    }
    let name = format!("prior_mean(alpha={},theta={})", params.alpha(), params.theta());
    let note = format!(
        "mean={:.5} target={:.5} se={:.5} z={:+.2} median remainder={:.2e}",
        r.mean, r.target, r.std_error, r.z_score, r.remainder_median
    );
    Ok(t.finish(&name, started).with_note(note))
}

/// H_2 = H_4 = log 2 > H_3 for the pattern A, B, A, B.
pub fn mle_counterexample() -> CheckResult {
    let started = Instant::now();
    let h: Vec<f64> = [&[0usize, 1][..], &[0, 1, 0], &[0, 1, 0, 1]]
        .iter()
        .map(|ids| mle_entropy(&SampleState::from_sequence(ids).expect("valid")).expect("nonempty"))
        .collect();
    let mut t = Tally::default();
    let ln2 = std::f64::consts::LN_2;
    t.check(h[0] == ln2 && h[2] == ln2 && h[0] > h[1], || {
        format!("H2={:.17e} H3={:.17e} H4={:.17e}", h[0], h[1], h[2])
    });
    t.finish("mle_not_monotone", started)
}

/// Ĥ_2 > Ĥ_3 < Ĥ_4 for A, B, A, B at α = 0.25, θ = 0.1.
pub fn pdp_counterexample() -> CheckResult {
    let started = Instant::now();
    let p = PdpParams::new(0.25, 0.1).expect("valid");
    let h: Vec<f64> = [&[0usize, 1][..], &[0, 1, 0], &[0, 1, 0, 1]]
        .iter()
        .map(|ids| posterior_mean_entropy(&SampleState::from_sequence(ids).expect("valid"), &p))
        .collect();
    let mut t = Tally::default();
    t.check(h[0] > h[1] && h[2] > h[1], || {
        format!("H2={:.17e} H3={:.17e} H4={:.17e}", h[0], h[1], h[2])
    });
    t.finish("pdp_not_monotone", started)
}

/// Both built-in specs pass the admissibility conditions on the grid.
pub fn general_admissibility(grid: &[PdpParams]) -> CheckResult {
    let started = Instant::now();
    let mut t = Tally::default();
    let mut specs = vec![GeneralEntropySpec::frequentist()];
    specs.extend(grid.iter().map(GeneralEntropySpec::pdp));
    for spec in &specs {
        let report = check_admissibility(spec, DEFAULT_GRID).expect("grid >= 3");
        t.check(report.is_admissible(), || format!("{report}"));
    }
    t.finish("general_admissibility", started)
}

/// The general class reproduces both estimators on random states.
pub fn general_specialization(states: u64, seed: u64) -> CheckResult {
    let started = Instant::now();
    let mut rng = RngSeed::new(seed, 0).rng();
    let mut t = Tally::default();
    let freq = GeneralEntropySpec::frequentist();
    for i in 0..states {
        let alpha: f64 = rng.random_range(0.0..0.95);
        let theta = -alpha + rng.random_range(0.01..15.0);
        let p = PdpParams::new(alpha, theta).expect("in range");
        let k = rng.random_range(1..=60usize);
        let counts: Vec<u64> = (0..k).map(|_| rng.random_range(1..=300u64)).collect();
        let s = SampleState::from_counts(counts).expect("positive");
        let pdp = GeneralEntropySpec::pdp(&p);
        let (gf, mf) = (
            general_entropy(&freq, &s).expect("ell >= 1"),
            mle_entropy(&s).expect("ell >= 1"),
        );
        let (gp, hp) = (
            general_entropy(&pdp, &s).expect("ell >= 1"),
            posterior_mean_entropy(&s, &p),
        );
        t.close(gf - mf, tol::GENERAL, || {
            format!("state {i}: general={gf:.17e} mle={mf:.17e}")
        });
        t.close(gp - hp, tol::GENERAL, || {
            format!("state {i} alpha={alpha} theta={theta}: general={gp:.17e} pdp={hp:.17e}")
        });
    }
    t.finish("general_specialization", started)
}

/// Median |Ĥ_PDP − Ĥ_MLE| over replicas at each checkpoint.
pub fn consistency_medians(params: &PdpParams, replicas: u64, checkpoints: &[u64], seed: u64) -> Vec<f64> {
    let last = checkpoints.iter().copied().max().unwrap_or(0);
    let per_replica: Vec<Vec<f64>> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = RngSeed::new(seed, r).rng();
            let mut state = SampleState::empty();
            let mut eval = PosteriorEntropy::new(*params);
            let mut out = Vec::with_capacity(checkpoints.len());
            for _ in 0..last {
                state.advance(params, &mut rng);
                if checkpoints.contains(&state.ell()) {
                    out.push((eval.mean(&state) - mle_entropy(&state).expect("ell >= 1")).abs());
                }
            }
            out
        })
        .collect();
    (0..checkpoints.len())
        .map(|i| {
            let mut col: Vec<f64> = per_replica.iter().map(|v| v[i]).collect();
            col.sort_by(f64::total_cmp);
            let n = col.len();
            if n % 2 == 1 {
                col[n / 2]
            } else {
                0.5 * (col[n / 2 - 1] + col[n / 2])
            }
        })
        .collect()
}

/// Median gap between the two estimators strictly decreasing over ℓ ∈ {10², 10³, 10⁴}.
pub fn consistency_trend(params: &PdpParams, replicas: u64, seed: u64) -> CheckResult {
    let started = Instant::now();
    let checkpoints = [100, 1_000, 10_000];
    let m = consistency_medians(params, replicas, &checkpoints, seed);
    let mut t = Tally::default();
    t.check(m.windows(2).all(|w| w[1] < w[0]), || {
        format!("medians at ell={checkpoints:?}: {m:?}")
    });
    let note = checkpoints
        .iter()
        .zip(&m)
        .map(|(l, v)| format!("ell={l}: {v:.3e}"))
        .collect::<Vec<_>>()
        .join(", ");
    t.finish("consistency_trend", started)
        .with_note(format!("median |H_pdp - H_mle|: {note}"))
}

/// Recurrence and log bounds on a logarithmic grid over [1e-3, 1e6].
pub fn digamma_invariants(points: usize) -> CheckResult {
    let started = Instant::now();
    let mut t = Tally::default();
    let (lo, hi) = (1e-3f64.ln(), 1e6f64.ln());
    for i in 0..points {
        let x = (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp();
        let (a, b) = (digamma(x).expect("x > 0"), digamma(x + 1.0).expect("x > 0"));
        let scale = 1.0 + a.abs().max(b.abs()).max(1.0 / x);
        t.close((b - a - 1.0 / x) / scale, 1e-12, || {
            format!("x={x:e}: psi(x+1)-psi(x)-1/x={:e}", b - a - 1.0 / x)
        });
        let (l, u) = digamma_log_bounds(x).expect("x > 0");
        t.check(l <= a + 1e-12 * scale && a <= u + 1e-12 * scale, || {
            format!("x={x:e}: psi={a:.17e} bounds=[{l:.17e}, {u:.17e}]")
        });
    }
    t.finish("digamma_invariants", started)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_counts() {
        let count = |ell, k| {
            let mut n = 0u64;
            for_each_composition(ell, k, &mut |_| n += 1);
            n
        };
        assert_eq!(count(12, 6), 462);
        assert_eq!((1..=12).map(|k| count(12, k)).sum::<u64>(), 2048);
        assert_eq!(count(3, 4), 0);
    }

    #[test]
    fn tally_keeps_first_failure_in_order() {
        let mut a = Tally::default();
        a.check(true, || unreachable!());
        let mut b = Tally::default();
        b.check(false, || "b".into());
        let mut c = Tally::default();
        c.close(2.0, 1.0, || "c".into());
        let r = a.merge(b).merge(c).finish("x", Instant::now());
        assert!(!r.passed);
        assert_eq!((r.evaluated, r.failures), (3, 2));
        assert_eq!(r.first_failure.as_deref(), Some("b"));
        assert_eq!(r.max_error, Some(2.0));
    }

    #[test]
    fn empty_tally_fails() {
        assert!(!Tally::default().finish("x", Instant::now()).passed);
    }

    #[test]
    fn small_campaign_passes() {
        let grid = params_list(&crate::config::default_grid()).unwrap();
        for r in trajectory_campaign(&grid, 2, 200, 5, 1) {
            assert!(r.passed, "{r:?}");
        }
        assert!(single_class_trajectory(500).passed);
        assert!(mle_counterexample().passed);
        assert!(pdp_counterexample().passed);
    }
}
