//! The full verification campaign.

use std::io::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use pdp_entropy::PdpParams;
use serde::Serialize;

use super::{open_output, output_error};
use crate::checks::{self, derive_seed, CheckResult};
use crate::config::{default_grid, Settings, DEFAULT_SEED};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub grid: Vec<(f64, f64)>,
    /// Trajectories per grid cell.
    pub replicas: u64,
    pub length: u64,
    pub seed: u64,
    /// GEM draws per prior Monte Carlo parameter set.
    pub prior_draws: u64,
    pub truncation: u64,
    #[serde(skip)]
    pub output_path: Option<PathBuf>,
}

pub const DEFAULT_REPLICAS: u64 = 625;
pub const DEFAULT_LENGTH: u64 = 1_000;
pub const DEFAULT_PRIOR_DRAWS: u64 = 10_000;
pub const DEFAULT_TRUNCATION: u64 = 10_000;
/// Largest sample size of the exhaustive extremality search.
pub const BRUTE_FORCE_MAX_ELL: u64 = 12;
pub const KAPPA_MAX_ELL: u64 = 100_000;
pub const GENERAL_STATES: u64 = 10_000;
/// Trajectories per cell whose increments also go through the general class.
pub const GENERAL_REPLICAS: u64 = 8;
pub const CONSISTENCY_REPLICAS: u64 = 100;

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            grid: default_grid(),
            replicas: DEFAULT_REPLICAS,
            length: DEFAULT_LENGTH,
            seed: DEFAULT_SEED,
            prior_draws: DEFAULT_PRIOR_DRAWS,
            truncation: DEFAULT_TRUNCATION,
            output_path: None,
        }
    }
}

impl VerifyConfig {
    /// `--alpha`/`--theta` select a single cell when no grid is given.
    pub fn resolve(s: &Settings) -> CliResult<VerifyConfig> {
        let d = VerifyConfig::default();
        let grid = match (&s.grid, s.alpha, s.theta) {
            (Some(g), _, _) => g.clone(),
            (None, Some(a), Some(t)) => vec![(a, t)],
            (None, None, None) => d.grid,
            _ => return Err(CliError::usage("give both --alpha and --theta, or --grid")),
        };
        checks::params_list(&grid)?;
        let cfg = VerifyConfig {
            grid,
            replicas: s.replicas.unwrap_or(d.replicas),
            length: s.length.unwrap_or(d.length),
            seed: s.seed.unwrap_or(d.seed),
            prior_draws: s.prior_draws.unwrap_or(d.prior_draws),
            truncation: s.truncation.unwrap_or(d.truncation),
            output_path: s.out.clone(),
        };
        if cfg.length < 1 || cfg.replicas < 1 {
            return Err(CliError::usage("length and replicas must be at least 1"));
        }
        if cfg.prior_draws < 2 {
            return Err(CliError::usage("prior-draws must be at least 2"));
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub config: VerifyConfig,
    pub passed: bool,
    pub first_failure: Option<String>,
    pub seconds: f64,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Runs every check; never stops early.
pub fn verify(cfg: &VerifyConfig) -> CliResult<VerifyReport> {
    let started = Instant::now();
    let grid = checks::params_list(&cfg.grid)?;
    let mut out = Vec::new();

    out.extend(checks::trajectory_campaign(
        &grid,
        cfg.replicas,
        cfg.length,
        cfg.seed,
        GENERAL_REPLICAS,
    ));
    out.push(checks::single_class_trajectory(cfg.length));
    out.push(checks::kappa_bounds(KAPPA_MAX_ELL));
    out.extend(checks::brute_force_extremes(&grid, BRUTE_FORCE_MAX_ELL));

    let dp = PdpParams::new(0.0, 1.0)?;
    let half = PdpParams::new(0.5, 0.5)?;
    out.push(checks::prior_mean_check(
        &dp,
        cfg.prior_draws,
        cfg.truncation,
        derive_seed(cfg.seed, 1),
        Some(1e-3),
    )?);
    out.push(checks::prior_mean_check(
        &half,
        cfg.prior_draws,
        cfg.truncation,
        derive_seed(cfg.seed, 2),
        None,
    )?);

    out.push(checks::mle_counterexample());
    out.push(checks::pdp_counterexample());

    out.push(checks::general_admissibility(&grid));
    out.push(checks::general_specialization(GENERAL_STATES, derive_seed(cfg.seed, 3)));

    let trend = PdpParams::new(0.5, 1.0)?;
    out.push(checks::consistency_trend(
        &trend,
        CONSISTENCY_REPLICAS,
        derive_seed(cfg.seed, 4),
    ));
    out.push(checks::digamma_invariants(1_000));

    let first_failure = out
        .iter()
        .find(|c| !c.passed)
        .map(|c| format!("{}: {}", c.name, c.first_failure.as_deref().unwrap_or("no details")));
    Ok(VerifyReport {
        config: cfg.clone(),
        passed: first_failure.is_none(),
        first_failure,
        seconds: started.elapsed().as_secs_f64(),
        checks: out,
    })
}

pub fn render(r: &VerifyReport) -> String {
    let mut s = format!(
        "verify: {} cells x {} trajectories of length {}, seed {}\n",
        r.config.grid.len(),
        r.config.replicas,
        r.config.length,
        r.config.seed
    );
    for c in &r.checks {
        let err = c.max_error.map(|e| format!("  max_err={e:.2e}")).unwrap_or_default();
        s += &format!(
            "{} {:<36} n={:<10}{}  ({:.2}s)\n",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.evaluated,
            err,
            c.seconds
        );
        if let Some(n) = &c.note {
            s += &format!("     {n}\n");
        }
        if let (false, Some(f)) = (c.passed, &c.first_failure) {
            s += &format!("     first failure: {f}\n");
        }
    }
    s += &match &r.first_failure {
        None => format!("all {} checks passed in {:.1}s\n", r.checks.len(), r.seconds),
        Some(f) => format!("FAILED {f}\n"),
    };
    s
}

/// Prints the report, writes the JSON summary to `--out` if given, and
/// fails with the first failing check.
pub fn run(cfg: &VerifyConfig) -> CliResult<VerifyReport> {
    let report = verify(cfg)?;
    print!("{}", render(&report));
    if let Some(path) = cfg.output_path.as_deref() {
        let mut out = open_output(Some(path))?;
        serde_json::to_writer_pretty(&mut out, &report)
            .map_err(std::io::Error::from)
            .and_then(|_| writeln!(out))
            .and_then(|_| out.flush())
            .map_err(|e| output_error(Some(path), e))?;
    }
    match &report.first_failure {
        None => Ok(report),
        Some(f) => Err(CliError::CheckFailed(f.clone())),
    }
}
