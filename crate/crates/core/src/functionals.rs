//! The discovery functional and its one-step increments.
//!
//! For PDP(α, θ) the functional is A_ℓ = (θ+ℓ)(Ĥ^max_ℓ − Ĥ_ℓ) with A_0 = 0.
//! Along any trajectory its increment Δ_{ℓ+1} = ψ(n_{j*} − α) − ψ(1 − α)
//! depends only on the updated frequency n_{j*}: it is zero at a discovery
//! and strictly positive otherwise. The weighted entropy increment
//! η_{ℓ+1} = (θ+ℓ+1)Ĥ_{ℓ+1} − (θ+ℓ)Ĥ_ℓ equals ψ(θ+ℓ+1) − ψ(n_{j*} − α) and the
//! two add up to the deterministic d_{ℓ+1} = ψ(θ+ℓ+1) − ψ(1−α).
//!
//! The frequentist analogue uses A^f_ℓ = ℓ(log ℓ − H_ℓ) = Σ n_i log n_i with
//! increment Δ^f = n log n − (n−1) log(n−1) at n = n_{j*}.
//!
//! Any other weighting b_ℓ of the gap Ĥ^max_ℓ − Ĥ_ℓ only adds a deterministic
//! sequence or rescales Δ, so no general weighting is provided.

use crate::entropy::weighted_posterior_entropy;
use crate::error::{Error, Result};
use crate::pdp::{PdpParams, SampleState, Transition};
use crate::special_fn::digamma_unchecked as psi;
use crate::sum::compensated_sum;

/// x log x with 0 log 0 = 0.
#[inline]
pub fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// κ(m) = m log m − (m−1) log(m−1) for m ≥ 1, evaluated as
/// log m − (m−1) log(1 − 1/m) to avoid cancellation for large m.
#[inline]
pub fn kappa(m: u64) -> f64 {
    if m <= 1 {
        0.0
    } else {
        let m = m as f64;
        m.ln() - (m - 1.0) * (-1.0 / m).ln_1p()
    }
}

/// A_ℓ = (θ+ℓ)(Ĥ^max_ℓ − Ĥ_ℓ), evaluated species by species as
/// Σ_i [(n_i−α)(ψ(n_i−α+1) − ψ(1−α)) − n_i]. Each bracket is the reward
/// collected by species i and is exactly zero for a singleton.
pub fn functional_a(state: &SampleState, params: &PdpParams) -> f64 {
    let alpha = params.alpha();
    let psi_base = psi(1.0 - alpha);
    compensated_sum(state.counts().iter().filter(|&&n| n > 1).map(|&n| {
        let x = n as f64 - alpha;
        x * (psi(x + 1.0) - psi_base) - n as f64
    }))
}

/// A^f_ℓ = ℓ(log ℓ − H_ℓ), evaluated as Σ n_i log n_i.
pub fn frequentist_functional(state: &SampleState) -> f64 {
    state.counts().iter().map(|&n| xlogx(n as f64)).sum()
}

/// Everything that changes in one step ℓ → ℓ+1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepVariation {
    /// Sample size after the step.
    pub ell: u64,
    /// n_{j*}, the frequency of the observed species after the step.
    pub updated_count: u64,
    pub is_discovery: bool,
    /// Δ_{ℓ+1} = A_{ℓ+1} − A_ℓ.
    pub delta: f64,
    /// η_{ℓ+1} = (θ+ℓ+1)Ĥ_{ℓ+1} − (θ+ℓ)Ĥ_ℓ.
    pub eta: f64,
    /// A_{ℓ+1}.
    pub a_value: f64,
    /// A^f_{ℓ+1}.
    pub a_f_value: f64,
    /// Δ^f_{ℓ+1} = A^f_{ℓ+1} − A^f_ℓ.
    pub delta_f: f64,
}

/// Closed-form Δ for a step whose observed species now has frequency
/// `count_after`.
#[inline]
pub fn delta_closed_form(count_after: u64, params: &PdpParams) -> f64 {
    if count_after <= 1 {
        return 0.0;
    }
    let alpha = params.alpha();
    psi(count_after as f64 - alpha) - psi(1.0 - alpha)
}

/// Closed-form η for the step from sample size `ell_before`.
#[inline]
pub fn eta_closed_form(ell_before: u64, count_after: u64, params: &PdpParams) -> f64 {
    psi(params.theta() + ell_before as f64 + 1.0) - psi(count_after as f64 - params.alpha())
}

/// The step variation for a transition already known to be valid; `next` is
/// the state after `transition`.
pub fn step_variation(next: &SampleState, transition: Transition, params: &PdpParams) -> StepVariation {
    let n = transition.count_after();
    StepVariation {
        ell: next.ell(),
        updated_count: n,
        is_discovery: transition.is_discovery(),
        delta: delta_closed_form(n, params),
        eta: eta_closed_form(transition.ell_before, n, params),
        a_value: functional_a(next, params),
        a_f_value: frequentist_functional(next),
        delta_f: kappa(n),
    }
}

/// Δ, η and the functionals after the step `prev → next`. Fails unless
/// `next` is a one-step successor of `prev`.
pub fn delta_step(prev: &SampleState, next: &SampleState, params: &PdpParams) -> Result<StepVariation> {
    let t = next.transition_from(prev)?;
    Ok(step_variation(next, t, params))
}

/// η_{ℓ+1} = ψ(θ+ℓ+1) − ψ(n_{j*} − α) > 0.
pub fn eta_step(prev: &SampleState, next: &SampleState, params: &PdpParams) -> Result<f64> {
    let t = next.transition_from(prev)?;
    Ok(eta_closed_form(t.ell_before, t.count_after(), params))
}

/// Δ^f_{ℓ+1} = n log n − (n−1) log(n−1) with n = n_{j*}.
pub fn frequentist_delta(prev: &SampleState, next: &SampleState) -> Result<f64> {
    let t = next.transition_from(prev)?;
    Ok(kappa(t.count_after()))
}

/// (ℓ+1)H_{ℓ+1} − ℓH_ℓ = κ(ℓ+1) − Δ^f_{ℓ+1}; zero iff a single class remains.
pub fn frequentist_weighted_entropy_step(prev: &SampleState, next: &SampleState) -> Result<f64> {
    let t = next.transition_from(prev)?;
    Ok(kappa(next.ell()) - kappa(t.count_after()))
}

/// Weighted increments of the maximal entropies at ℓ → ℓ+1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxEntropyStep {
    /// d_{ℓ+1} = (θ+ℓ+1)Ĥ^max_{ℓ+1} − (θ+ℓ)Ĥ^max_ℓ = ψ(θ+ℓ+1) − ψ(1−α).
    pub bayes: f64,
    /// d^f_{ℓ+1} = (ℓ+1) log(ℓ+1) − ℓ log ℓ.
    pub frequentist: f64,
}

pub fn max_entropy_weighted_step(ell: u64, params: &PdpParams) -> MaxEntropyStep {
    MaxEntropyStep {
        bayes: psi(params.theta() + ell as f64 + 1.0) - psi(1.0 - params.alpha()),
        frequentist: kappa(ell + 1),
    }
}

/// Envelope for η_{ℓ+1} implied by ln x − 1/x ≤ ψ(x) ≤ ln x − 1/(2x).
pub fn eta_bounds(ell_before: u64, count_after: u64, params: &PdpParams) -> (f64, f64) {
    let top = params.theta() + ell_before as f64 + 1.0;
    let bottom = count_after as f64 - params.alpha();
    let base = top.ln() - bottom.ln();
    (base - 1.0 / top + 0.5 / bottom, base - 0.5 / top + 1.0 / bottom)
}

/// Telescoped form of a trajectory: the weighted entropy as a deterministic
/// term plus per-observation discovery values, and A_ℓ as a sum of
/// nonnegative reinforcement rewards.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscoveryDecomposition {
    /// C_ℓ(α, θ) = Σ_{i≤ℓ} ψ(θ+i) + θψ(θ+1) − θψ(1−α).
    pub c_term: f64,
    /// −ψ(n*(i) − α) for i = 1..ℓ.
    pub discovery_values: Vec<f64>,
    /// ψ(n*(i) − α) − ψ(1−α) for i = 1..ℓ.
    pub reinforcement_rewards: Vec<f64>,
}

impl DiscoveryDecomposition {
    /// Builds the decomposition from n*(1), …, n*(ℓ), the frequency of each
    /// observation's species at the time it was observed.
    pub fn from_frequencies(n_star: &[u64], params: &PdpParams) -> Result<Self> {
        if let Some(i) = n_star.iter().position(|&n| n == 0) {
            return Err(Error::InvalidState(format!("n*({}) = 0", i + 1)));
        }
        let (alpha, theta) = (params.alpha(), params.theta());
        let psi_base = psi(1.0 - alpha);
        let c_term = compensated_sum(
            (1..=n_star.len())
                .map(|i| psi(theta + i as f64))
                .chain([theta * psi(theta + 1.0), -theta * psi_base]),
        );
        let discovery_values: Vec<f64> = n_star.iter().map(|&n| -psi(n as f64 - alpha)).collect();
        let reinforcement_rewards = n_star.iter().map(|&n| delta_closed_form(n, params)).collect();
        Ok(Self {
            c_term,
            discovery_values,
            reinforcement_rewards,
        })
    }

    /// C_ℓ − Σ ψ(n*(i) − α), which equals (θ+ℓ)Ĥ_ℓ.
    pub fn weighted_entropy(&self) -> f64 {
        compensated_sum(std::iter::once(self.c_term).chain(self.discovery_values.iter().copied()))
    }

    /// Σ rewards, which equals A_ℓ.
    pub fn functional_a(&self) -> f64 {
        compensated_sum(self.reinforcement_rewards.iter().copied())
    }
}

/// Decomposition of the trajectory `states[i]` = sample at ℓ = i + 1.
pub fn discovery_decomposition(trajectory: &[SampleState], params: &PdpParams) -> Result<DiscoveryDecomposition> {
    let n_star = trajectory
        .iter()
        .enumerate()
        .map(|(i, s)| {
            if s.ell() != i as u64 + 1 {
                return Err(Error::InvalidState(format!(
                    "trajectory entry {i} has ell = {}, expected {}",
                    s.ell(),
                    i + 1
                )));
            }
            s.last_count()
                .ok_or_else(|| Error::InvalidState(format!("trajectory entry {i} has no last species")))
        })
        .collect::<Result<Vec<_>>>()?;
    DiscoveryDecomposition::from_frequencies(&n_star, params)
}

/// (θ+ℓ)Ĥ^max_ℓ − (θ+ℓ)Ĥ_ℓ recomputed from the entropy module; used to
/// cross-check [`functional_a`].
pub fn functional_a_from_entropies(state: &SampleState, params: &PdpParams) -> f64 {
    crate::entropy::weighted_global_max(state.ell(), params) - weighted_posterior_entropy(state, params)
}
