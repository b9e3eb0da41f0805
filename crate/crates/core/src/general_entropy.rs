//! A family of entropies sharing the discovery-flatness property.
//!
//! An entropy in this class is given by
//!
//! ```text
//! w(ℓ)·H̄_ℓ = u(a+ℓ) − b − Σ_i (u(n_i − c) + v)
//! ```
//!
//! where w is positive and increasing, n ↦ u(n+1−c) − u(n−c) is increasing,
//! 0 ≤ c < 1, a ≥ −c and 2u(1−c) + v < u(2−c). Under these conditions the
//! maximum over samples of size ℓ is attained by all-singleton samples and
//! Δ^H̄_{ℓ+1} = w(ℓ+1)(H̄^max_{ℓ+1} − H̄_{ℓ+1}) − w(ℓ)(H̄^max_ℓ − H̄_ℓ) vanishes
//! exactly at discoveries. The plug-in entropy and the PDP posterior mean
//! entropy are both members; see [`GeneralEntropySpec::frequentist`] and
//! [`GeneralEntropySpec::pdp`].

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::functionals::xlogx;
use crate::pdp::{PdpParams, SampleState};
use crate::special_fn::digamma_unchecked as psi;

pub type WeightFn = Arc<dyn Fn(u64) -> f64 + Send + Sync>;
pub type ShapeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Default grid bound for admissibility checks.
pub const DEFAULT_GRID: u64 = 10_000;

/// The tuple (w, u, a, b, c, v).
#[derive(Clone)]
pub struct GeneralEntropySpec {
    pub name: String,
    pub w: WeightFn,
    pub u: ShapeFn,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub v: f64,
}

impl fmt::Debug for GeneralEntropySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneralEntropySpec")
            .field("name", &self.name)
            .field("a", &self.a)
            .field("b", &self.b)
            .field("c", &self.c)
            .field("v", &self.v)
            .finish_non_exhaustive()
    }
}

impl GeneralEntropySpec {
    /// Plug-in entropy: w(ℓ) = ℓ, u(x) = x log x, a = b = c = v = 0.
    pub fn frequentist() -> Self {
        Self {
            name: "frequentist".into(),
            w: Arc::new(|ell| ell as f64),
            u: Arc::new(xlogx),
            a: 0.0,
            b: 0.0,
            c: 0.0,
            v: 0.0,
        }
    }

    /// PDP posterior mean entropy: w(ℓ) = θ+ℓ, u(x) = xψ(x+1), a = θ,
    /// b = θψ(1−α), c = α, v = αψ(1−α).
    pub fn pdp(params: &PdpParams) -> Self {
        let (alpha, theta) = (params.alpha(), params.theta());
        let base = psi(1.0 - alpha);
        Self {
            name: "pdp".into(),
            w: Arc::new(move |ell| theta + ell as f64),
            u: Arc::new(|x| x * psi(x + 1.0)),
            a: theta,
            b: theta * base,
            c: alpha,
            v: alpha * base,
        }
    }

    /// Looks up a built-in spec: `frequentist` or `pdp`.
    pub fn builtin(name: &str, params: &PdpParams) -> Result<Self> {
        match name {
            "frequentist" => Ok(Self::frequentist()),
            "pdp" => Ok(Self::pdp(params)),
            other => Err(Error::Range(format!(
                "unknown entropy spec '{other}' (expected 'frequentist' or 'pdp')"
            ))),
        }
    }

    #[inline]
    fn u(&self, x: f64) -> f64 {
        (self.u)(x)
    }

    /// u(1−c) + v, the cost of one singleton class.
    #[inline]
    fn singleton(&self) -> f64 {
        self.u(1.0 - self.c) + self.v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport {
    pub spec: String,
    pub grid_max: u64,
    pub checks: Vec<CheckOutcome>,
}

impl AdmissibilityReport {
    pub fn is_admissible(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for AdmissibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "admissibility of '{}' (grid n <= {}):", self.spec, self.grid_max)?;
        for c in &self.checks {
            writeln!(
                f,
                "  [{}] {}: {}",
                if c.passed { "pass" } else { "FAIL" },
                c.name,
                c.detail
            )?;
        }
        Ok(())
    }
}

fn outcome(name: &'static str, passed: bool, detail: impl Into<String>) -> CheckOutcome {
    CheckOutcome {
        name,
        passed,
        detail: detail.into(),
    }
}

/// Checks the constant conditions exactly and the functional conditions on
/// n = 1..=grid_max:
///
/// - `c_range`: 0 ≤ c < 1
/// - `a_lower_bound`: a ≥ −c
/// - `singleton_split`: 2u(1−c) + v < u(2−c)
/// - `increasing_increments`: u(n+1−c) − u(n−c) strictly increasing
/// - `weight_positive_increasing`: w(ℓ) > 0 and strictly increasing
/// - `weighted_step_nonnegative`: u(n+a+1) − u(n+a) ≥ u(m−c+1) − u(m−c) for m ≤ n
pub fn check_admissibility(spec: &GeneralEntropySpec, grid_max: u64) -> Result<AdmissibilityReport> {
    if grid_max < 3 {
        return Err(Error::Range(format!("grid_max must be at least 3, got {grid_max}")));
    }
    let (a, c, v) = (spec.a, spec.c, spec.v);
    let mut checks = Vec::with_capacity(6);

    checks.push(outcome("c_range", (0.0..1.0).contains(&c), format!("c = {c}")));
    checks.push(outcome("a_lower_bound", a >= -c, format!("a = {a}, -c = {}", -c)));

    let (u1, u2) = (spec.u(1.0 - c), spec.u(2.0 - c));
    let split_ok = u1.is_finite() && u2.is_finite() && 2.0 * u1 + v < u2;
    checks.push(outcome(
        "singleton_split",
        split_ok,
        format!("2u(1-c) + v = {}, u(2-c) = {u2}", 2.0 * u1 + v),
    ));

    let increment = |x: f64| spec.u(x + 1.0) - spec.u(x);

    let mut incr_ok = true;
    let mut incr_detail = format!("increments strictly increase for n = 1..={grid_max}");
    let mut prev = increment(1.0 - c);
    for n in 2..=grid_max {
        let cur = increment(n as f64 - c);
        if !cur.is_finite() || !prev.is_finite() || cur <= prev {
            incr_ok = false;
            incr_detail = format!("u(n+1-c) - u(n-c) = {cur} at n = {n} after {prev} at n = {}", n - 1);
            break;
        }
        prev = cur;
    }
    checks.push(outcome("increasing_increments", incr_ok, incr_detail));

    let mut w_ok = true;
    let mut w_detail = format!("w positive and increasing on 1..={grid_max}");
    let mut w_prev = (spec.w)(1);
    if w_prev.is_nan() || w_prev <= 0.0 {
        w_ok = false;
        w_detail = format!("w(1) = {w_prev}");
    } else {
        for ell in 2..=grid_max {
            let w_cur = (spec.w)(ell);
            if !w_cur.is_finite() || w_cur <= w_prev {
                w_ok = false;
                w_detail = format!("w({ell}) = {w_cur} after w({}) = {w_prev}", ell - 1);
                break;
            }
            w_prev = w_cur;
        }
    }
    checks.push(outcome("weight_positive_increasing", w_ok, w_detail));

    let mut step_ok = true;
    let mut step_detail = format!("holds for m <= n <= {grid_max}");
    let mut running_max = f64::NEG_INFINITY;
    for n in 1..=grid_max {
        running_max = running_max.max(increment(n as f64 - c));
        let lhs = increment(n as f64 + a);
        if !lhs.is_finite() || !running_max.is_finite() || lhs < running_max {
            step_ok = false;
            step_detail = format!("u(n+a+1) - u(n+a) = {lhs} < {running_max} at n = {n}");
            break;
        }
    }
    checks.push(outcome("weighted_step_nonnegative", step_ok, step_detail));

    Ok(AdmissibilityReport {
        spec: spec.name.clone(),
        grid_max,
        checks,
    })
}

/// w(ℓ)·H̄_ℓ = u(a+ℓ) − b − Σ(u(n_i−c) + v); defined for ℓ ≥ 0.
pub fn weighted_general_entropy(spec: &GeneralEntropySpec, state: &SampleState) -> f64 {
    let classes: f64 = state.counts().iter().map(|&n| spec.u(n as f64 - spec.c) + spec.v).sum();
    spec.u(spec.a + state.ell() as f64) - spec.b - classes
}

/// H̄_ℓ for ℓ ≥ 1. The spec is assumed admissible.
pub fn general_entropy(spec: &GeneralEntropySpec, state: &SampleState) -> Result<f64> {
    if state.ell() == 0 {
        return Err(Error::EmptySample);
    }
    Ok(weighted_general_entropy(spec, state) / (spec.w)(state.ell()))
}

/// w(ℓ)·H̄^max_ℓ = u(a+ℓ) − b − ℓ(u(1−c) + v).
pub fn weighted_general_max(spec: &GeneralEntropySpec, ell: u64) -> f64 {
    spec.u(spec.a + ell as f64) - spec.b - ell as f64 * spec.singleton()
}

/// Δ^H̄_{ℓ+1}: zero at a discovery, otherwise
/// u(n−c+1) − u(n−c) − (u(1−c) + v) with n the pre-step frequency.
pub fn general_delta(spec: &GeneralEntropySpec, prev: &SampleState, next: &SampleState) -> Result<f64> {
    let t = next.transition_from(prev)?;
    if t.is_discovery() {
        return Ok(0.0);
    }
    let x = t.count_before as f64 - spec.c;
    Ok(spec.u(x + 1.0) - spec.u(x) - spec.singleton())
}

/// w(ℓ+1)H̄_{ℓ+1} − w(ℓ)H̄_ℓ. A discovery adds a singleton class, costing
/// u(1−c) + v; otherwise the updated class moves from u(n−c) to u(n−c+1).
pub fn general_weighted_entropy_step(spec: &GeneralEntropySpec, prev: &SampleState, next: &SampleState) -> Result<f64> {
    let t = next.transition_from(prev)?;
    let ell = prev.ell() as f64;
    let growth = spec.u(spec.a + ell + 1.0) - spec.u(spec.a + ell);
    let class_cost = if t.is_discovery() {
        spec.singleton()
    } else {
        let x = t.count_before as f64 - spec.c;
        spec.u(x + 1.0) - spec.u(x)
    };
    Ok(growth - class_cost)
}
