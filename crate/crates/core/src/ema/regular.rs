use super::{check_gamma, check_unit, EmaError, EmaSolution};

/// Exact solution on `c`-regular two-block graphs.
pub fn regular_solution(c: u32, p1: f64, gamma: f64) -> Result<EmaSolution, EmaError> {
    if c < 3 {
        return Err(EmaError::InvalidDegree(format!("c = {c} < 3")));
    }
    check_unit(p1)?;
    let cf = c as f64;
    check_gamma(gamma, cf, p1)?;
    let p2 = 1.0 - p1;
    let big_gamma = 1.0 - gamma / (cf * p1 * p2);
    let k = cf - 1.0;
    if big_gamma >= 1.0 / k.sqrt() {
        let a = k * big_gamma - 1.0;
        let a_hat = 1.0 / (k * big_gamma) - 1.0;
        let lambda2 = (1.0 - big_gamma) * (k - 1.0 / big_gamma);
        let m11_hat_sq = (p2 / (cf * p1))
            * (1.0 - 1.0 / (k * k * big_gamma * big_gamma))
            * (k * big_gamma * big_gamma - 1.0);
        Ok(EmaSolution {
            a,
            a_hat,
            phi: -lambda2,
            psi: 0.0,
            m11_sq: k * k * m11_hat_sq.max(0.0),
            m11_hat_sq: m11_hat_sq.max(0.0),
            lambda2,
            detectable: true,
            gamma_param: big_gamma,
        })
    } else {
        let s = k.sqrt();
        let lambda2 = cf - 2.0 * s;
        Ok(EmaSolution {
            a: s - 1.0,
            a_hat: 1.0 / s - 1.0,
            phi: -lambda2,
            psi: 0.0,
            m11_sq: 0.0,
            m11_hat_sq: 0.0,
            lambda2,
            detectable: false,
            gamma_param: big_gamma,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdModel {
    RegularL { c: u32 },
    NcutGeneral { cbar: f64 },
    SbmNcut { cbar: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    /// Cross-edge density at the transition.
    pub gamma_c: f64,
    /// `Γ` (or `Γ̄`) at the transition.
    pub gamma_param_c: f64,
    /// `c_in − c_out` at the transition; defined for equal modules only.
    pub delta_c: Option<f64>,
    /// The information-theoretic limit `2√c̄`.
    pub ultimate_delta: f64,
}

pub fn detectability_threshold(model: ThresholdModel, p1: f64) -> Result<Threshold, EmaError> {
    check_unit(p1)?;
    let c = match model {
        ThresholdModel::RegularL { c } => {
            if c < 3 {
                return Err(EmaError::InvalidDegree(format!("c = {c} < 3")));
            }
            c as f64
        }
        ThresholdModel::NcutGeneral { cbar } | ThresholdModel::SbmNcut { cbar } => {
            if !(cbar > 1.0 && cbar.is_finite()) {
                return Err(EmaError::InvalidDegree(format!("cbar = {cbar} <= 1")));
            }
            cbar
        }
    };
    let gamma_param_c = 1.0 / (c - 1.0).sqrt();
    let gamma_c = c * (1.0 - gamma_param_c) * p1 * (1.0 - p1);
    let delta_c = (p1 == 0.5).then(|| 2.0 * c / (c - 1.0).sqrt());
    Ok(Threshold { gamma_c, gamma_param_c, delta_c, ultimate_delta: 2.0 * c.sqrt() })
}
