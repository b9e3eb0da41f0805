use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("digamma domain error: argument {0} must be finite and > 0")]
    Domain(f64),

    #[error("invalid PDP parameters (alpha = {alpha}, theta = {theta}): {reason}")]
    InvalidParams {
        alpha: f64,
        theta: f64,
        reason: &'static str,
    },

    #[error("invalid sample state: {0}")]
    InvalidState(String),

    #[error("state at ell = {next} is not a one-step successor of the state at ell = {prev}: {reason}")]
    NotSuccessor { prev: u64, next: u64, reason: String },

    #[error("out of range: {0}")]
    Range(String),

    #[error("entropy of an empty sample is undefined")]
    EmptySample,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
