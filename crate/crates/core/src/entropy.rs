//! Entropy estimators for a species sample and their extremal values.
//!
//! The posterior mean of H(π) under a PDP(α, θ) prior given frequencies
//! n_1..n_k at sample size ℓ is
//!
//! ```text
//! Ĥ_ℓ = ψ(θ+ℓ+1) − (θ+αk)/(θ+ℓ) · ψ(1−α) − 1/(θ+ℓ) · Σ_i (n_i−α) ψ(n_i−α+1)
//! ```
//!
//! Most identities are cleaner for the weighted quantity (θ+ℓ)·Ĥ_ℓ, which is
//! also defined at ℓ = 0 (k = 0) as θψ(θ+1) − θψ(1−α); both forms are exposed.

use crate::error::{Error, Result};
use crate::functionals::xlogx;
use crate::pdp::{PdpParams, SampleState};
use crate::special_fn::digamma_unchecked as psi;
use crate::sum::compensated_sum;

/// ψ(θ+1) − ψ(1−α), the prior mean of H(π).
pub fn prior_mean_entropy(params: &PdpParams) -> f64 {
    psi(params.theta() + 1.0) - psi(1.0 - params.alpha())
}

/// (θ+ℓ)·Ĥ_ℓ for the posterior mean entropy.
pub fn weighted_posterior_entropy(state: &SampleState, params: &PdpParams) -> f64 {
    let (alpha, theta) = (params.alpha(), params.theta());
    let w = theta + state.ell() as f64;
    let species_term: f64 = state
        .counts()
        .iter()
        .map(|&n| {
            let x = n as f64 - alpha;
            x * psi(x + 1.0)
        })
        .sum();
    w * psi(w + 1.0) - (theta + alpha * state.k() as f64) * psi(1.0 - alpha) - species_term
}

/// Posterior mean entropy Ĥ_ℓ = E[H(π) | sample]. At ℓ = 0 this is the
/// prior mean.
pub fn posterior_mean_entropy(state: &SampleState, params: &PdpParams) -> f64 {
    if state.ell() == 0 {
        return prior_mean_entropy(params);
    }
    weighted_posterior_entropy(state, params) / (params.theta() + state.ell() as f64)
}

/// Posterior entropy evaluator that memoises (n−α)·ψ(n−α+1) by frequency.
///
/// Gives the same values as [`posterior_mean_entropy`] at a fraction of the
/// cost when many states under one parameter pair are evaluated.
#[derive(Debug, Clone)]
pub struct PosteriorEntropy {
    params: PdpParams,
    psi_base: f64,
    by_count: Vec<f64>,
}

impl PosteriorEntropy {
    pub fn new(params: PdpParams) -> Self {
        Self {
            psi_base: psi(1.0 - params.alpha()),
            params,
            by_count: vec![0.0],
        }
    }

    pub fn params(&self) -> &PdpParams {
        &self.params
    }

    fn species_term(&mut self, n: u64) -> f64 {
        let n = n as usize;
        while self.by_count.len() <= n {
            let x = self.by_count.len() as f64 - self.params.alpha();
            self.by_count.push(x * psi(x + 1.0));
        }
        self.by_count[n]
    }

    /// (θ+ℓ)·Ĥ_ℓ.
    pub fn weighted(&mut self, state: &SampleState) -> f64 {
        let (alpha, theta) = (self.params.alpha(), self.params.theta());
        let w = theta + state.ell() as f64;
        let mut species = 0.0;
        for &n in state.counts() {
            species += self.species_term(n);
        }
        w * psi(w + 1.0) - (theta + alpha * state.k() as f64) * self.psi_base - species
    }

    /// Ĥ_ℓ.
    pub fn mean(&mut self, state: &SampleState) -> f64 {
        if state.ell() == 0 {
            return prior_mean_entropy(&self.params);
        }
        self.weighted(state) / (self.params.theta() + state.ell() as f64)
    }
}

/// Plug-in Shannon entropy of the empirical frequencies, with 0·log 0 = 0.
pub fn mle_entropy(state: &SampleState) -> Result<f64> {
    if state.ell() == 0 {
        return Err(Error::EmptySample);
    }
    if state.k() == 1 {
        return Ok(0.0);
    }
    // log ℓ − (1/ℓ) Σ n log n; singletons contribute exactly zero
    let ell = state.ell() as f64;
    let weighted = compensated_sum(state.counts().iter().map(|&n| xlogx(n as f64)));
    Ok(ell.ln() - weighted / ell)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtremeKind {
    Max,
    Min,
}

/// The frequency vector attaining the maximal or minimal posterior entropy
/// among samples of size ℓ with exactly k species.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtremalConfig {
    pub counts: Vec<u64>,
    pub kind: ExtremeKind,
    pub k: usize,
    pub ell: u64,
}

impl ExtremalConfig {
    pub fn to_state(&self) -> SampleState {
        SampleState::from_counts(self.counts.clone()).expect("extremal counts are positive")
    }
}

/// Balanced frequencies (⌊ℓ/k⌋ repeated k − h times, ⌊ℓ/k⌋ + 1 repeated
/// h = ℓ − k⌊ℓ/k⌋ times) for the maximum; (ℓ−k+1, 1, …, 1) for the minimum.
pub fn extremal_config(ell: u64, k: usize, kind: ExtremeKind) -> Result<ExtremalConfig> {
    if k == 0 || k as u64 > ell {
        return Err(Error::Range(format!("need 1 <= k <= ell, got k = {k}, ell = {ell}")));
    }
    let counts = match kind {
        ExtremeKind::Max => {
            let base = ell / k as u64;
            let high = (ell - base * k as u64) as usize;
            let mut v = vec![base; k - high];
            v.extend(std::iter::repeat_n(base + 1, high));
            v
        }
        ExtremeKind::Min => {
            let mut v = vec![ell - k as u64 + 1];
            v.extend(std::iter::repeat_n(1, k - 1));
            v
        }
    };
    Ok(ExtremalConfig { counts, kind, k, ell })
}

/// Largest posterior mean entropy over all samples of size ℓ (every
/// observation its own species): ψ(θ+ℓ+1) − ψ(1−α) − ℓ/(θ+ℓ).
pub fn global_max_entropy(ell: u64, params: &PdpParams) -> f64 {
    let l = ell as f64;
    psi(params.theta() + l + 1.0) - psi(1.0 - params.alpha()) - l / (params.theta() + l)
}

/// Smallest posterior mean entropy over all samples of size ℓ ≥ 1 (a single
/// species): ψ(θ+ℓ+1) − (θ+α)ψ(1−α)/(θ+ℓ) − (ℓ−α)ψ(ℓ−α+1)/(θ+ℓ).
/// At ℓ = 0 returns the prior mean.
pub fn global_min_entropy(ell: u64, params: &PdpParams) -> f64 {
    if ell == 0 {
        return prior_mean_entropy(params);
    }
    weighted_global_min(ell, params) / (params.theta() + ell as f64)
}

/// (θ+ℓ) times [`global_max_entropy`], computed without division.
pub fn weighted_global_max(ell: u64, params: &PdpParams) -> f64 {
    let w = params.theta() + ell as f64;
    w * (psi(w + 1.0) - psi(1.0 - params.alpha())) - ell as f64
}

/// (θ+ℓ) times [`global_min_entropy`] for ℓ ≥ 1.
pub fn weighted_global_min(ell: u64, params: &PdpParams) -> f64 {
    if ell == 0 {
        return weighted_global_max(0, params);
    }
    let (alpha, theta) = (params.alpha(), params.theta());
    let w = theta + ell as f64;
    let top = ell as f64 - alpha;
    w * psi(w + 1.0) - (theta + alpha) * psi(1.0 - alpha) - top * psi(top + 1.0)
}
