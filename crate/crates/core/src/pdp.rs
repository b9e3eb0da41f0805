//! Sequential species sampling under PDP(α, θ).
//!
//! Observations are generated with the predictive rule: given a sample of
//! size ℓ with k species and frequencies n_1..n_k, the next draw joins
//! species j with probability (n_j − α)/(θ + ℓ) and founds a new species with
//! probability (θ + αk)/(θ + ℓ). Species carry no labels beyond their
//! discovery order; ids are zero-based indices into [`SampleState::counts`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};
use crate::sum::compensated_sum;

/// Generator used for every simulation in this crate.
pub type SimRng = ChaCha8Rng;

/// Discount `alpha` and concentration `theta` with 0 ≤ α < 1 and θ > −α.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdpParams {
    alpha: f64,
    theta: f64,
}

impl PdpParams {
    pub fn new(alpha: f64, theta: f64) -> Result<Self> {
        let invalid = |reason| Error::InvalidParams { alpha, theta, reason };
        if !alpha.is_finite() || !theta.is_finite() {
            return Err(invalid("parameters must be finite"));
        }
        if !(0.0..1.0).contains(&alpha) {
            return Err(invalid("alpha must lie in [0, 1)"));
        }
        if theta <= -alpha {
            return Err(invalid("theta must exceed -alpha"));
        }
        Ok(Self { alpha, theta })
    }

    /// The Dirichlet process, α = 0.
    pub fn dirichlet(theta: f64) -> Result<Self> {
        Self::new(0.0, theta)
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// Seed plus sub-stream id. Equal pairs reproduce identical trajectories;
/// distinct streams under one seed are independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RngSeed {
    pub seed: u64,
    pub stream: u64,
}

impl RngSeed {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> SimRng {
        let mut rng = SimRng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// The sample after ℓ observations.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SampleState {
    ell: u64,
    counts: Vec<u64>,
    last_species: Option<usize>,
}

impl SampleState {
    /// The empty sample, ℓ = 0.
    pub fn empty() -> Self {
        Self::default()
    }

    /// A sample with the given frequencies and no record of the last draw.
    pub fn from_counts(counts: Vec<u64>) -> Result<Self> {
        let state = Self {
            ell: counts.iter().sum(),
            counts,
            last_species: None,
        };
        state.validate()?;
        Ok(state)
    }

    /// A sample whose most recent observation belonged to `last_species`.
    pub fn with_last(counts: Vec<u64>, last_species: usize) -> Result<Self> {
        let state = Self {
            ell: counts.iter().sum(),
            counts,
            last_species: Some(last_species),
        };
        state.validate()?;
        Ok(state)
    }

    /// Replays a sequence of species ids (in discovery order, zero-based).
    ///
    /// Each id must either name an already seen species or be exactly the
    /// next unused id.
    pub fn from_sequence(ids: &[usize]) -> Result<Self> {
        let mut state = Self::empty();
        for &id in ids {
            match id.cmp(&state.counts.len()) {
                std::cmp::Ordering::Less => state.counts[id] += 1,
                std::cmp::Ordering::Equal => state.counts.push(1),
                std::cmp::Ordering::Greater => {
                    return Err(Error::InvalidState(format!(
                        "species id {id} skips unseen ids (k = {})",
                        state.counts.len()
                    )))
                }
            }
            state.ell += 1;
            state.last_species = Some(id);
        }
        Ok(state)
    }

    pub fn validate(&self) -> Result<()> {
        if self.counts.contains(&0) {
            return Err(Error::InvalidState("zero frequency".into()));
        }
        let total: u64 = self.counts.iter().sum();
        if total != self.ell {
            return Err(Error::InvalidState(format!(
                "frequencies sum to {total} but ell = {}",
                self.ell
            )));
        }
        if let Some(j) = self.last_species {
            if j >= self.counts.len() {
                return Err(Error::InvalidState(format!(
                    "last species {j} out of range (k = {})",
                    self.counts.len()
                )));
            }
        }
        Ok(())
    }

    /// Sample size ℓ.
    #[inline]
    pub fn ell(&self) -> u64 {
        self.ell
    }

    /// Number of distinct species k.
    #[inline]
    pub fn k(&self) -> usize {
        self.counts.len()
    }

    #[inline]
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    #[inline]
    pub fn last_species(&self) -> Option<usize> {
        self.last_species
    }

    /// Frequency of the last-updated species, n*(ℓ).
    #[inline]
    pub fn last_count(&self) -> Option<u64> {
        self.last_species.map(|j| self.counts[j])
    }

    /// Whether the most recent observation founded a new species.
    #[inline]
    pub fn is_discovery(&self) -> bool {
        self.last_count() == Some(1)
    }

    /// Adds one observation of species `j`; `j == k` founds a new species.
    pub fn observe(&mut self, j: usize) -> Result<Transition> {
        let k = self.counts.len();
        if j > k {
            return Err(Error::InvalidState(format!("species id {j} > k = {k}")));
        }
        Ok(self.observe_unchecked(j))
    }

    fn observe_unchecked(&mut self, j: usize) -> Transition {
        let count_before = if j == self.counts.len() {
            self.counts.push(1);
            0
        } else {
            self.counts[j] += 1;
            self.counts[j] - 1
        };
        self.ell += 1;
        self.last_species = Some(j);
        Transition {
            ell_before: self.ell - 1,
            species: j,
            count_before,
        }
    }

    /// Recovers the transition that leads from `prev` to `self`, or fails if
    /// `self` is not a one-step successor of `prev`.
    pub fn transition_from(&self, prev: &SampleState) -> Result<Transition> {
        let mismatch = |reason: String| Error::NotSuccessor {
            prev: prev.ell,
            next: self.ell,
            reason,
        };
        if self.ell != prev.ell + 1 {
            return Err(mismatch("sample sizes do not differ by one".into()));
        }
        let j = self
            .last_species
            .ok_or_else(|| mismatch("successor has no last species".into()))?;
        let (kp, kn) = (prev.counts.len(), self.counts.len());
        let shared_ok = if j == kp {
            kn == kp + 1 && self.counts[j] == 1 && self.counts[..kp] == prev.counts[..]
        } else {
            kn == kp
                && self.counts[j] == prev.counts[j] + 1
                && self.counts[..j] == prev.counts[..j]
                && self.counts[j + 1..] == prev.counts[j + 1..]
        };
        if !shared_ok {
            return Err(mismatch(format!(
                "frequencies do not differ by a single increment of species {j}"
            )));
        }
        Ok(Transition {
            ell_before: prev.ell,
            species: j,
            count_before: prev.counts.get(j).copied().unwrap_or(0),
        })
    }

    /// Draws the next observation in place.
    pub fn advance<R: Rng + ?Sized>(&mut self, params: &PdpParams, rng: &mut R) -> Transition {
        let j = self.draw_species(params, rng);
        self.observe_unchecked(j)
    }

    fn draw_species<R: Rng + ?Sized>(&self, params: &PdpParams, rng: &mut R) -> usize {
        let k = self.counts.len();
        if self.ell == 0 {
            return 0;
        }
        let (alpha, theta) = (params.alpha, params.theta);
        let total = theta + self.ell as f64;
        let mut r = rng.random::<f64>() * total - (theta + alpha * k as f64);
        if r < 0.0 {
            return k;
        }
        for (j, &n) in self.counts.iter().enumerate() {
            r -= n as f64 - alpha;
            if r < 0.0 {
                return j;
            }
        }
        // Rounding left r marginally nonnegative; the last species absorbs it.
        k - 1
    }
}

/// One observation: species `species` went from `count_before` to
/// `count_before + 1` at sample size `ell_before + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transition {
    pub ell_before: u64,
    pub species: usize,
    pub count_before: u64,
}

impl Transition {
    /// n_{j*}, the updated frequency after the step.
    #[inline]
    pub fn count_after(&self) -> u64 {
        self.count_before + 1
    }

    #[inline]
    pub fn is_discovery(&self) -> bool {
        self.count_before == 0
    }
}

/// Conditional law of the next observation.
#[derive(Debug, Clone, PartialEq)]
pub struct Predictive {
    pub new_species: f64,
    pub existing: Vec<f64>,
}

/// Predictive probabilities for the next draw. At ℓ = 0 the next draw is a
/// new species with probability one.
pub fn predictive_probabilities(state: &SampleState, params: &PdpParams) -> Result<Predictive> {
    state.validate()?;
    if state.ell == 0 {
        return Ok(Predictive {
            new_species: 1.0,
            existing: Vec::new(),
        });
    }
    let denom = params.theta + state.ell as f64;
    Ok(Predictive {
        new_species: (params.theta + params.alpha * state.k() as f64) / denom,
        existing: state
            .counts
            .iter()
            .map(|&n| (n as f64 - params.alpha) / denom)
            .collect(),
    })
}

/// Returns the successor of `state` after one draw.
pub fn step<R: Rng + ?Sized>(state: &SampleState, params: &PdpParams, rng: &mut R) -> SampleState {
    let mut next = state.clone();
    next.advance(params, rng);
    next
}

/// States for ℓ = 1..=length, starting from the empty sample.
pub fn simulate_trajectory<R: Rng + ?Sized>(params: &PdpParams, length: u64, rng: &mut R) -> Result<Vec<SampleState>> {
    if length == 0 {
        return Err(Error::Range("trajectory length must be at least 1".into()));
    }
    let mut state = SampleState::empty();
    let mut out = Vec::with_capacity(length as usize);
    for _ in 0..length {
        state.advance(params, rng);
        out.push(state.clone());
    }
    Ok(out)
}

/// Runs `length` draws from the empty sample and reports each transition
/// without materialising intermediate states.
pub fn simulate_transitions<R: Rng + ?Sized>(
    params: &PdpParams,
    length: u64,
    rng: &mut R,
    mut visit: impl FnMut(&SampleState, Transition),
) -> SampleState {
    let mut state = SampleState::empty();
    for _ in 0..length {
        let t = state.advance(params, rng);
        visit(&state, t);
    }
    state
}

/// A truncated GEM(α, θ) draw.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorWeights {
    /// π_1, π_2, … in stick-breaking order.
    pub weights: Vec<f64>,
    /// Mass 1 − Σ π_k left on the unbroken stick.
    pub remainder: f64,
    /// Requested number of sticks T. `weights` is shorter only when the
    /// remaining stick fell below [`NEGLIGIBLE_REMAINDER`].
    pub truncation: usize,
}

/// Breaking stops once the unbroken stick is this short; later weights would
/// underflow to zero.
pub const NEGLIGIBLE_REMAINDER: f64 = 1e-300;

impl PriorWeights {
    /// Σ π_k + remainder, with compensated summation.
    pub fn total_mass(&self) -> f64 {
        compensated_sum(self.weights.iter().copied().chain(std::iter::once(self.remainder)))
    }

    /// Shannon entropy of the truncated weight vector, tail mass excluded.
    pub fn entropy(&self) -> f64 {
        -self
            .weights
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.ln())
            .sum::<f64>()
    }
}

/// Stick-breaking draw π_k = β_k Π_{j<k} (1 − β_j), β_k ~ Beta(1 − α, θ + αk).
pub fn sample_gem_weights<R: Rng + ?Sized>(params: &PdpParams, truncation: usize, rng: &mut R) -> Result<PriorWeights> {
    if truncation == 0 {
        return Err(Error::Range("truncation must be at least 1".into()));
    }
    let (alpha, theta) = (params.alpha, params.theta);
    let first = Gamma::new(1.0 - alpha, 1.0).expect("1 - alpha > 0");
    let mut weights = Vec::with_capacity(truncation.min(1 << 16));
    let mut remainder = 1.0f64;
    for k in 1..=truncation {
        if remainder < NEGLIGIBLE_REMAINDER {
            break;
        }
        let second = Gamma::new(theta + alpha * k as f64, 1.0).expect("theta + alpha k > 0");
        let beta = beta_from_gammas(&first, &second, rng);
        weights.push(beta * remainder);
        remainder *= 1.0 - beta;
    }
    Ok(PriorWeights {
        weights,
        remainder,
        truncation,
    })
}

/// Beta(a, b) as X / (X + Y) with X ~ Gamma(a), Y ~ Gamma(b).
fn beta_from_gammas<R: Rng + ?Sized>(x: &Gamma<f64>, y: &Gamma<f64>, rng: &mut R) -> f64 {
    loop {
        let a = x.sample(rng);
        let b = y.sample(rng);
        let s = a + b;
        if s > 0.0 {
            return a / s;
        }
    }
}
