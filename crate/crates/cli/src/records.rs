//! CSV rows. Floats carry 17 significant digits so values round-trip.

use std::fmt::Write as _;
use std::io::{self, Write};

/// Writes `x` with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// One simulated step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub replica: u64,
    pub ell: u64,
    pub k: usize,
    pub last_count: u64,
    pub is_discovery: bool,
    pub h_mle: f64,
    pub h_pdp: f64,
    pub h_max: f64,
    pub h_min: f64,
    pub a_value: f64,
    pub delta: f64,
    pub eta: f64,
    pub a_f: f64,
    pub delta_f: f64,
}

impl StepRecord {
    pub const HEADER: &'static str =
        "replica,ell,k,last_count,is_discovery,h_mle,h_pdp,h_max,h_min,a_value,delta,eta,a_f,delta_f";

    pub fn write_csv<W: Write + ?Sized>(&self, out: &mut W) -> io::Result<()> {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.replica,
            self.ell,
            self.k,
            self.last_count,
            u8::from(self.is_discovery),
            fmt_f64(self.h_mle),
            fmt_f64(self.h_pdp),
            fmt_f64(self.h_max),
            fmt_f64(self.h_min),
            fmt_f64(self.a_value),
            fmt_f64(self.delta),
            fmt_f64(self.eta),
            fmt_f64(self.a_f),
            fmt_f64(self.delta_f),
        )
    }

    pub fn is_finite(&self) -> bool {
        [
            self.h_mle,
            self.h_pdp,
            self.h_max,
            self.h_min,
            self.a_value,
            self.delta,
            self.eta,
            self.a_f,
            self.delta_f,
        ]
        .iter()
        .all(|x| x.is_finite())
    }
}

/// One row of the bounds table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsRecord {
    pub replica: u64,
    pub ell: u64,
    pub k: usize,
    pub last_count: u64,
    pub h_pdp: f64,
    pub h_max: f64,
    pub h_min: f64,
    pub eta: f64,
    pub eta_lower: f64,
    pub eta_upper: f64,
    pub eta_approx: f64,
    pub d: f64,
    pub d_approx: f64,
    pub d_f: f64,
    pub d_f_approx: f64,
    pub weighted_min: f64,
    pub sandwich_violation: bool,
    pub eta_bounds_violation: bool,
    pub weighted_min_violation: bool,
}

impl BoundsRecord {
    pub const HEADER: &'static str = "replica,ell,k,last_count,h_pdp,h_max,h_min,eta,eta_lower,eta_upper,eta_approx,\
d,d_approx,d_f,d_f_approx,weighted_min,sandwich_violation,eta_bounds_violation,weighted_min_violation";

    pub fn any_violation(&self) -> bool {
        self.sandwich_violation || self.eta_bounds_violation || self.weighted_min_violation
    }

    pub fn write_csv<W: Write + ?Sized>(&self, out: &mut W) -> io::Result<()> {
        let mut line = format!("{},{},{},{}", self.replica, self.ell, self.k, self.last_count);
        for x in [
            self.h_pdp,
            self.h_max,
            self.h_min,
            self.eta,
            self.eta_lower,
            self.eta_upper,
            self.eta_approx,
            self.d,
            self.d_approx,
            self.d_f,
            self.d_f_approx,
            self.weighted_min,
        ] {
            let _ = write!(line, ",{}", fmt_f64(x));
        }
        for flag in [
            self.sandwich_violation,
            self.eta_bounds_violation,
            self.weighted_min_violation,
        ] {
            let _ = write!(line, ",{}", u8::from(flag));
        }
        writeln!(out, "{line}")
    }
}
