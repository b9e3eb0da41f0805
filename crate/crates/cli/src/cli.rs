//! Argument parsing and dispatch.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{bounds, prior_mc, simulate, verify};
use crate::config::{parse_grid, parse_u64_arg, Defaults, RunConfig, Settings};
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "pdp-entropy",
    version,
    about = "Entropy and discovery functionals for PDP sampling"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate trajectories and write one CSV row per step.
    Simulate(RunArgs),
    /// Run the verification campaign; exit 1 on the first failed check.
    Verify(VerifyArgs),
    /// Monte Carlo estimate of the prior mean entropy from truncated GEM draws.
    PriorMc(RunArgs),
    /// Per-step extremes, η bounds and large-ℓ approximations as CSV.
    Bounds(RunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Discount parameter, 0 ≤ α < 1.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Concentration parameter, θ > −α.
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    /// Steps per trajectory.
    #[arg(long, value_parser = parse_u64_arg)]
    pub length: Option<u64>,
    /// Independent replicas.
    #[arg(long, value_parser = parse_u64_arg)]
    pub replicas: Option<u64>,
    /// Master seed; replica r uses stream r.
    #[arg(long, value_parser = parse_u64_arg)]
    pub seed: Option<u64>,
    /// Sticks per GEM draw.
    #[arg(long, value_parser = parse_u64_arg)]
    pub truncation: Option<u64>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated α:θ pairs.
    #[arg(long, value_parser = parse_grid_arg)]
    pub grid: Option<Grid>,
    /// Flat `key = value` file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// GEM draws for each prior Monte Carlo check.
    #[arg(long, value_parser = parse_u64_arg)]
    pub prior_draws: Option<u64>,
}

/// Parsed `--grid` value.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<(f64, f64)>);

fn parse_grid_arg(v: &str) -> Result<Grid, String> {
    parse_grid(v).map(Grid)
}

impl RunArgs {
    fn settings(&self, prior_draws: Option<u64>) -> CliResult<Settings> {
        let file = match &self.config {
            Some(p) => Settings::from_file(p)?,
            None => Settings::default(),
        };
        let flags = Settings {
            alpha: self.alpha,
            theta: self.theta,
            length: self.length,
            replicas: self.replicas,
            seed: self.seed,
            truncation: self.truncation,
            out: self.out.clone(),
            grid: self.grid.clone().map(|g| g.0),
            prior_draws,
        };
        Ok(file.overridden_by(flags))
    }

    fn single_run(&self, defaults: Defaults) -> CliResult<RunConfig> {
        let s = self.settings(None)?;
        if s.grid.is_some() {
            return Err(CliError::usage("--grid only applies to verify"));
        }
        RunConfig::resolve(&s, defaults)
    }
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate(args) => {
            let cfg = args.single_run(Defaults {
                length: 1_000,
                replicas: 1,
                truncation: 10_000,
            })?;
            simulate::run(&cfg)
        }
        Command::Verify(args) => {
            let cfg = verify::VerifyConfig::resolve(&args.run.settings(args.prior_draws)?)?;
            verify::run(&cfg).map(|_| ())
        }
        Command::PriorMc(args) => {
            let cfg = args.single_run(Defaults {
                length: 1,
                replicas: 10_000,
                truncation: 10_000,
            })?;
            prior_mc::run(&cfg).map(|_| ())
        }
        Command::Bounds(args) => {
            let cfg = args.single_run(Defaults {
                length: 10_000,
                replicas: 1,
                truncation: 10_000,
            })?;
            match bounds::run(&cfg)? {
                0 => Ok(()),
                n => Err(CliError::CheckFailed(format!("{n} rows outside their stated bounds"))),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn parses_every_flag() {
        let cli = Cli::try_parse_from([
            "pdp-entropy",
            "verify",
            "--alpha",
            "0.25",
            "--theta",
            "-0.15",
            "--length",
            "1e3",
            "--replicas",
            "4",
            "--seed",
            "7",
            "--truncation",
            "200",
            "--out",
            "x.json",
            "--grid",
            "0:1,0.5:-0.4",
            "--prior-draws",
            "10",
        ])
        .unwrap();
        let Command::Verify(v) = cli.command else {
            panic!("wrong subcommand")
        };
        let s = v.run.settings(v.prior_draws).unwrap();
        assert_eq!(s.theta, Some(-0.15));
        assert_eq!(s.length, Some(1000));
        assert_eq!(s.grid, Some(vec![(0.0, 1.0), (0.5, -0.4)]));
        assert_eq!(s.prior_draws, Some(10));
    }

    #[test]
    fn grid_is_verify_only() {
        let cli = Cli::try_parse_from([
            "pdp-entropy",
            "simulate",
            "--alpha",
            "0",
            "--theta",
            "1",
            "--grid",
            "0:1",
        ])
        .unwrap();
        assert!(matches!(run(cli), Err(CliError::Usage(_))));
    }
}
