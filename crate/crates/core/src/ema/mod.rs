//! Effective-medium closed forms.
//!
//! The variance fields are frozen to single values `a`, `â`; the remaining
//! stationarity conditions are then algebraic. RatioCut, Ncut and the regular
//! case share [`EmaSolution`].

mod fraction;
mod ncut;
mod ratiocut;
mod regular;

pub use fraction::{gaussian_fraction_correct, gaussian_module_fractions, FractionModel};
pub use ncut::{appendix_c_diagnostic, ncut_ema, ncut_ema_mean, sbm_lambda2_curve, AppendixC};
pub use ratiocut::{ratiocut_ema, ratiocut_ema_distribution, MomentSet};
pub use regular::{detectability_threshold, regular_solution, Threshold, ThresholdModel};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EmaError {
    #[error("invalid degree: {0}")]
    InvalidDegree(String),
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("parameters outside the valid region: {0}")]
    InvalidRegion(String),
    #[error("quadratic for a has no real root (discriminant {0:e})")]
    NoRealRoot(f64),
    #[error("closure equations have no root: {0}")]
    NewtonDiverged(String),
    #[error("the combined fraction is only defined for equal modules (p1 = {0})")]
    UnequalModulesUnsupported(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmaSolution {
    pub a: f64,
    pub a_hat: f64,
    pub phi: f64,
    pub psi: f64,
    /// Squared module-1 mean of the cavity field ratio.
    pub m11_sq: f64,
    /// Squared module-1 mean of the conjugate field ratio.
    pub m11_hat_sq: f64,
    pub lambda2: f64,
    pub detectable: bool,
    /// `Γ = 1 − γ/(c p1 p2)`, or `Γ̄` with `c̄`.
    pub gamma_param: f64,
}

pub(crate) fn check_unit(p1: f64) -> Result<(), EmaError> {
    if p1 > 0.0 && p1 < 1.0 {
        Ok(())
    } else {
        Err(EmaError::InvalidRegion(format!("p1 = {p1} outside (0, 1)")))
    }
}

pub(crate) fn check_gamma(gamma: f64, cbar: f64, p1: f64) -> Result<(), EmaError> {
    let limit = cbar * p1.min(1.0 - p1);
    if !(gamma >= 0.0) || gamma > limit + 1e-12 {
        return Err(EmaError::InvalidRegion(format!("gamma = {gamma} outside [0, {limit}]")));
    }
    Ok(())
}

/// Bisection of a bracketed sign change, to the resolution of `f64`.
pub(crate) fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
