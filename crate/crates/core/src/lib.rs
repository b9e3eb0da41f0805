//! Sequential species sampling under the two-parameter Poisson–Dirichlet
//! process PDP(α, θ), Bayesian and plug-in entropy estimators, and the
//! discovery functional A_ℓ that stays constant exactly when a new species is
//! observed.
//!
//! ```
//! use pdp_entropy::{PdpParams, RngSeed, SampleState, delta_step};
//!
//! let params = PdpParams::new(0.5, 1.0).unwrap();
//! let mut rng = RngSeed::new(7, 0).rng();
//! let mut state = SampleState::empty();
//! for _ in 0..100 {
//!     let prev = state.clone();
//!     state.advance(&params, &mut rng);
//!     let v = delta_step(&prev, &state, &params).unwrap();
//!     assert!(v.delta >= 0.0);
//!     assert_eq!(v.delta == 0.0, v.is_discovery);
//! }
//! ```

pub mod entropy;
pub mod error;
pub mod functionals;
pub mod general_entropy;
pub mod pdp;
pub mod special_fn;
mod sum;

pub use entropy::{
    extremal_config, global_max_entropy, global_min_entropy, mle_entropy, posterior_mean_entropy, prior_mean_entropy,
    weighted_global_max, weighted_global_min, weighted_posterior_entropy, ExtremalConfig, ExtremeKind,
    PosteriorEntropy,
};
pub use error::{Error, Result};
pub use functionals::{
    delta_step, discovery_decomposition, eta_bounds, eta_step, frequentist_delta, frequentist_functional,
    frequentist_weighted_entropy_step, functional_a, kappa, max_entropy_weighted_step, step_variation,
    DiscoveryDecomposition, MaxEntropyStep, StepVariation,
};
pub use general_entropy::{
    check_admissibility, general_delta, general_entropy, general_weighted_entropy_step, AdmissibilityReport,
    GeneralEntropySpec,
};
pub use pdp::{
    predictive_probabilities, sample_gem_weights, simulate_trajectory, simulate_transitions, step, PdpParams,
    Predictive, PriorWeights, RngSeed, SampleState, SimRng, Transition,
};
pub use special_fn::{digamma, digamma_log_bounds, digamma_weighted_step};
