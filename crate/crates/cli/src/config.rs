//! Run settings from flags and an optional `key = value` file.

use std::path::{Path, PathBuf};

use pdp_entropy::PdpParams;

use crate::error::{CliError, CliResult};

/// Every setting any subcommand understands. Unset fields fall back to the
/// subcommand's defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub alpha: Option<f64>,
    pub theta: Option<f64>,
    pub length: Option<u64>,
    pub replicas: Option<u64>,
    pub seed: Option<u64>,
    pub truncation: Option<u64>,
    pub out: Option<PathBuf>,
    pub grid: Option<Vec<(f64, f64)>>,
    pub prior_draws: Option<u64>,
}

impl Settings {
    /// Values set in `over` win.
    pub fn overridden_by(self, over: Settings) -> Settings {
        Settings {
            alpha: over.alpha.or(self.alpha),
            theta: over.theta.or(self.theta),
            length: over.length.or(self.length),
            replicas: over.replicas.or(self.replicas),
            seed: over.seed.or(self.seed),
            truncation: over.truncation.or(self.truncation),
            out: over.out.or(self.out),
            grid: over.grid.or(self.grid),
            prior_draws: over.prior_draws.or(self.prior_draws),
        }
    }

    /// Parses the flat config format: one `key = value` per line, `#` starts a
    /// comment, blank lines are ignored. Keys may use `-` or `_`.
    pub fn parse(text: &str) -> CliResult<Settings> {
        let mut s = Settings::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lineno = i + 1;
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("config line {lineno}: expected `key = value`")))?;
            let key = key.trim().replace('-', "_");
            let value = value.trim();
            let bad = |e: String| CliError::usage(format!("config line {lineno}: {key}: {e}"));
            match key.as_str() {
                "alpha" => s.alpha = Some(parse_f64(value).map_err(bad)?),
                "theta" => s.theta = Some(parse_f64(value).map_err(bad)?),
                "length" => s.length = Some(parse_u64(value).map_err(bad)?),
                "replicas" => s.replicas = Some(parse_u64(value).map_err(bad)?),
                "seed" => s.seed = Some(parse_u64(value).map_err(bad)?),
                "truncation" => s.truncation = Some(parse_u64(value).map_err(bad)?),
                "prior_draws" => s.prior_draws = Some(parse_u64(value).map_err(bad)?),
                "out" => s.out = Some(PathBuf::from(value)),
                "grid" => s.grid = Some(parse_grid(value).map_err(bad)?),
                _ => return Err(CliError::usage(format!("config line {lineno}: unknown key `{key}`"))),
            }
        }
        Ok(s)
    }

    pub fn from_file(path: &Path) -> CliResult<Settings> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Settings::parse(&text)
    }
}

fn parse_f64(v: &str) -> Result<f64, String> {
    v.parse::<f64>().map_err(|e| format!("`{v}`: {e}"))
}

fn parse_u64(v: &str) -> Result<u64, String> {
    // allow 1e4-style integers
    if let Ok(n) = v.parse::<u64>() {
        return Ok(n);
    }
    match v.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x < u64::MAX as f64 => Ok(x as u64),
        _ => Err(format!("`{v}` is not a nonnegative integer")),
    }
}

/// `α:θ` pairs separated by commas, e.g. `0:1,0.5:0.5`.
pub fn parse_grid(v: &str) -> Result<Vec<(f64, f64)>, String> {
    let grid = v
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|pair| {
            let (a, t) = pair
                .split_once(':')
                .ok_or_else(|| format!("`{pair}` is not an alpha:theta pair"))?;
            Ok((parse_f64(a.trim())?, parse_f64(t.trim())?))
        })
        .collect::<Result<Vec<_>, String>>()?;
    if grid.is_empty() {
        return Err("empty grid".into());
    }
    Ok(grid)
}

/// Value parser for clap.
pub fn parse_u64_arg(v: &str) -> Result<u64, String> {
    parse_u64(v)
}

/// α ∈ {0, 0.25, 0.5, 0.9} × θ ∈ {−α+0.1, 0.5, 1, 10}.
pub fn default_grid() -> Vec<(f64, f64)> {
    let mut grid = Vec::with_capacity(16);
    for alpha in [0.0, 0.25, 0.5, 0.9] {
        for theta in [-alpha + 0.1, 0.5, 1.0, 10.0] {
            grid.push((alpha, theta));
        }
    }
    grid
}

/// Resolved settings for one PDP run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: PdpParams,
    pub length: u64,
    pub replicas: u64,
    pub seed: u64,
    pub truncation: u64,
    pub output_path: Option<PathBuf>,
}

pub const DEFAULT_SEED: u64 = 1;

pub struct Defaults {
    pub length: u64,
    pub replicas: u64,
    pub truncation: u64,
}

impl RunConfig {
    pub fn resolve(s: &Settings, d: Defaults) -> CliResult<RunConfig> {
        let alpha = s.alpha.ok_or_else(|| CliError::usage("--alpha is required"))?;
        let theta = s.theta.ok_or_else(|| CliError::usage("--theta is required"))?;
        let params = PdpParams::new(alpha, theta)?;
        let cfg = RunConfig {
            params,
            length: s.length.unwrap_or(d.length),
            replicas: s.replicas.unwrap_or(d.replicas),
            seed: s.seed.unwrap_or(DEFAULT_SEED),
            truncation: s.truncation.unwrap_or(d.truncation),
            output_path: s.out.clone(),
        };
        if cfg.length < 1 {
            return Err(CliError::usage("length must be at least 1"));
        }
        if cfg.replicas < 1 {
            return Err(CliError::usage("replicas must be at least 1"));
        }
        Ok(cfg)
    }
}
