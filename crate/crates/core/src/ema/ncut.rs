use super::{check_gamma, check_unit, EmaError, EmaSolution};
use crate::graphs::DegreeSpec;

/// Closed form for the normalized Laplacian; depends on the law through `c̄`
/// only.
pub fn ncut_ema(spec: &DegreeSpec, p1: f64, gamma: f64) -> Result<EmaSolution, EmaError> {
    spec.validate().map_err(|e| EmaError::InvalidSpec(e.to_string()))?;
    ncut_ema_mean(spec.mean_degree(), p1, gamma)
}

pub fn ncut_ema_mean(cbar: f64, p1: f64, gamma: f64) -> Result<EmaSolution, EmaError> {
    if !(cbar > 1.0 && cbar.is_finite()) {
        return Err(EmaError::InvalidSpec(format!("cbar = {cbar} <= 1")));
    }
    check_unit(p1)?;
    check_gamma(gamma, cbar, p1)?;
    let p2 = 1.0 - p1;
    let g = 1.0 - gamma / (cbar * p1 * p2);
    let k = cbar - 1.0;
    if g >= 1.0 / k.sqrt() {
        let lambda2 = (1.0 - g) * (k - 1.0 / g) / cbar;
        let m11_sq = k * k * (p2 / (cbar * p1)) * (1.0 - 1.0 / (k * k * g * g)) * (k * g * g - 1.0);
        Ok(EmaSolution {
            a: k * g - 1.0,
            a_hat: 1.0 / (k * g) - 1.0,
            phi: -lambda2,
            psi: 0.0,
            m11_sq: m11_sq.max(0.0),
            m11_hat_sq: (m11_sq / (k * k)).max(0.0),
            lambda2,
            detectable: true,
            gamma_param: g,
        })
    } else {
        let s = k.sqrt();
        let lambda2 = (s - 1.0).powi(2) / cbar;
        Ok(EmaSolution {
            a: s - 1.0,
            a_hat: 1.0 / s - 1.0,
            phi: -lambda2,
            psi: 0.0,
            m11_sq: 0.0,
            m11_hat_sq: 0.0,
            lambda2,
            detectable: false,
            gamma_param: g,
        })
    }
}

/// `λ2` of the normalized Laplacian on an equal-module block model as a
/// function of `Δ = c_in − c_out`, constant below the threshold.
pub fn sbm_lambda2_curve(cbar: f64, delta: f64) -> Result<f64, EmaError> {
    if !(cbar > 1.0 && cbar.is_finite()) {
        return Err(EmaError::InvalidSpec(format!("cbar = {cbar} <= 1")));
    }
    if !(delta > 0.0 && delta <= 2.0 * cbar) {
        return Err(EmaError::InvalidRegion(format!("delta = {delta} outside (0, 2 cbar]")));
    }
    let k = cbar - 1.0;
    let delta_c = 2.0 * cbar / k.sqrt();
    if delta < delta_c {
        Ok((k.sqrt() - 1.0).powi(2) / cbar)
    } else {
        Ok(1.0 - k / (2.0 * cbar * cbar) * delta - 2.0 / delta)
    }
}

/// Ratios `m_{1r} / m̂_{1r}` under the two effective-medium variants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AppendixC {
    /// Closure applied to the saddle-point equations: `c²‾/c̄ − 1`.
    pub ratio_saddle_ema: f64,
    /// Closure applied to the free energy: `c̄ − 1`.
    pub ratio_free_energy_ema: f64,
}

pub fn appendix_c_diagnostic(spec: &DegreeSpec) -> Result<AppendixC, EmaError> {
    spec.validate().map_err(|e| EmaError::InvalidSpec(e.to_string()))?;
    let d = spec.distribution();
    let cbar = d.mean();
    Ok(AppendixC { ratio_saddle_ema: d.moment(2) / cbar - 1.0, ratio_free_energy_ema: cbar - 1.0 })
}
