//! Monte Carlo estimate of the prior mean entropy from truncated GEM draws.

use std::io::Write as _;

use pdp_entropy::{prior_mean_entropy, sample_gem_weights, PdpParams, RngSeed};
use rayon::prelude::*;
use serde::Serialize;

use super::{open_output, output_error};
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

pub const MIN_TRUNCATION: u64 = 100;

/// Summary of a prior Monte Carlo run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriorMcReport {
    pub alpha: f64,
    pub theta: f64,
    pub replicas: u64,
    pub truncation: u64,
    pub seed: u64,
    pub mean: f64,
    pub std_error: f64,
    /// ψ(θ+1) − ψ(1−α).
    pub target: f64,
    /// (mean − target) / std_error.
    pub z_score: f64,
    pub remainder_median: f64,
    pub remainder_mean: f64,
    pub remainder_max: f64,
    /// Mean of r·(1 + log(T/r)) over draws, a rough scale for the entropy
    /// carried by the unbroken stick of mass r.
    pub tail_entropy_scale: f64,
}

impl PriorMcReport {
    pub fn within_sigmas(&self, sigmas: f64) -> bool {
        (self.mean - self.target).abs() <= sigmas * self.std_error
    }
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Draw `replicas` truncated weight vectors; draw `i` uses stream `i` of `seed`.
pub fn prior_mc(params: &PdpParams, replicas: u64, truncation: u64, seed: u64) -> CliResult<PriorMcReport> {
    if truncation < MIN_TRUNCATION {
        return Err(CliError::usage(format!("truncation must be at least {MIN_TRUNCATION}")));
    }
    if replicas < 2 {
        return Err(CliError::usage("prior Monte Carlo needs at least 2 replicas"));
    }
    let draws: Vec<(f64, f64)> = (0..replicas)
        .into_par_iter()
        .map(|i| {
            let w = sample_gem_weights(params, truncation as usize, &mut RngSeed::new(seed, i).rng())
                .expect("truncation >= 1");
            (w.entropy(), w.remainder)
        })
        .collect();

    let n = replicas as f64;
    let mean = draws.iter().map(|d| d.0).sum::<f64>() / n;
    let var = draws.iter().map(|d| (d.0 - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let std_error = (var / n).sqrt();
    let target = prior_mean_entropy(params);
    let mut rem: Vec<f64> = draws.iter().map(|d| d.1).collect();
    let remainder_mean = rem.iter().sum::<f64>() / n;
    let remainder_max = rem.iter().copied().fold(0.0, f64::max);
    let t = truncation as f64;
    let tail_entropy_scale = rem
        .iter()
        .map(|&r| if r > 0.0 { r * (1.0 + (t / r).ln()) } else { 0.0 })
        .sum::<f64>()
        / n;
    Ok(PriorMcReport {
        alpha: params.alpha(),
        theta: params.theta(),
        replicas,
        truncation,
        seed,
        mean,
        std_error,
        target,
        z_score: (mean - target) / std_error,
        remainder_median: median(&mut rem),
        remainder_mean,
        remainder_max,
        tail_entropy_scale,
    })
}

pub fn render(r: &PriorMcReport) -> String {
    format!(
        "prior mean entropy, alpha = {}, theta = {}\n\
         draws              {}\n\
         truncation         {}\n\
         mean H             {:.6}\n\
         standard error     {:.6}\n\
         target             {:.6}\n\
         z                  {:+.3}\n\
         remainder median   {:.3e}\n\
         remainder mean     {:.3e}\n\
         remainder max      {:.3e}\n\
         tail entropy scale {:.3e}\n",
        r.alpha,
        r.theta,
        r.replicas,
        r.truncation,
        r.mean,
        r.std_error,
        r.target,
        r.z_score,
        r.remainder_median,
        r.remainder_mean,
        r.remainder_max,
        r.tail_entropy_scale
    )
}

/// Prints the text report; `--out` additionally receives the JSON summary.
pub fn run(cfg: &RunConfig) -> CliResult<PriorMcReport> {
    let report = prior_mc(&cfg.params, cfg.replicas, cfg.truncation, cfg.seed)?;
    print!("{}", render(&report));
    if let Some(path) = cfg.output_path.as_deref() {
        let mut out = open_output(Some(path))?;
        serde_json::to_writer_pretty(&mut out, &report)
            .map_err(std::io::Error::from)
            .and_then(|_| writeln!(out))
            .and_then(|_| out.flush())
            .map_err(|e| output_error(Some(path), e))?;
    }
    Ok(report)
}
