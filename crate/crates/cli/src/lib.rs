//! Command-line driver for `pdp-entropy`: trajectory export, the
//! verification campaign, prior Monte Carlo and the bounds table.
//!
//! Every random quantity is drawn from a ChaCha stream selected by
//! `(seed, replica)`, so outputs depend only on the configuration.

pub mod checks;
pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod records;

pub use config::{RunConfig, Settings};
pub use error::{CliError, CliResult};
pub use records::{BoundsRecord, StepRecord};
