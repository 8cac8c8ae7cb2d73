use super::{check_unit, ncut, regular_solution, EmaError};
use crate::graphs::DegreeSpec;
use libm::erf;

#[derive(Debug, Clone, PartialEq)]
pub enum FractionModel {
    RegularL { c: u32 },
    NcutGeneral { spec: DegreeSpec },
}

/// Per-module Gaussian estimates of the fraction of correctly classified
/// vertices.
///
/// The conjugate second moment `m̂2`, shared by both modules, is fixed by the
/// normalization `Σ_r p_r ⟨x²⟩_r = 1`; orthogonality gives
/// `m̂12 = −(p1/p2) m̂11`. Undetectable parameters give exactly one half.
pub fn gaussian_module_fractions(model: &FractionModel, p1: f64, gamma: f64) -> Result<[f64; 2], EmaError> {
    check_unit(p1)?;
    let p2 = 1.0 - p1;
    // mean = mu * m̂1r, <x²> = k2 * (w2 * m̂2 + w1 * m̂1r²)
    let (sol, mu, k2, w2, w1) = match model {
        FractionModel::RegularL { c } => {
            let sol = regular_solution(*c, p1, gamma)?;
            let cf = *c as f64;
            let kg = (cf - 1.0) * sol.gamma_param;
            let kk = kg / (kg * kg - 1.0);
            (sol, cf * kk, kk * kk, cf, cf * (cf - 1.0))
        }
        FractionModel::NcutGeneral { spec } => {
            let sol = ncut::ncut_ema(spec, p1, gamma)?;
            let d = spec.distribution();
            let (cbar, c2, c3) = (d.mean(), d.moment(2), d.moment(3));
            let kg = (cbar - 1.0) * sol.gamma_param;
            let kk = kg / (kg * kg - 1.0);
            (sol, c2 / cbar * kk, kk * kk, c2 / cbar, (c3 - c2) / cbar)
        }
    };
    if !sol.detectable || sol.m11_hat_sq <= 0.0 {
        return Ok([0.5, 0.5]);
    }
    let m1 = [sol.m11_hat_sq.sqrt(), -(p1 / p2) * sol.m11_hat_sq.sqrt()];
    let mean_sq = p1 * m1[0] * m1[0] + p2 * m1[1] * m1[1];
    let m2_hat = (1.0 / k2 - w1 * mean_sq) / w2;
    let mut out = [0.5; 2];
    for r in 0..2 {
        let m = mu * m1[r];
        let s2 = k2 * (w2 * m2_hat + w1 * m1[r] * m1[r]) - m * m;
        out[r] = if s2 <= 0.0 { 1.0 } else { 0.5 * (1.0 + erf(m.abs() / (2.0 * s2).sqrt())) };
    }
    Ok(out)
}

/// Combined fraction for equal modules.
pub fn gaussian_fraction_correct(model: &FractionModel, p1: f64, gamma: f64) -> Result<f64, EmaError> {
    if p1 != 0.5 {
        return Err(EmaError::UnequalModulesUnsupported(p1));
    }
    let f = gaussian_module_fractions(model, p1, gamma)?;
    Ok(0.5 * (f[0] + f[1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limits() {
        let m = FractionModel::RegularL { c: 3 };
        assert_eq!(gaussian_fraction_correct(&m, 0.5, 0.0).unwrap(), 1.0);
        assert_eq!(gaussian_fraction_correct(&m, 0.5, 0.22).unwrap(), 0.5);
        assert!(matches!(
            gaussian_fraction_correct(&m, 0.6, 0.1),
            Err(EmaError::UnequalModulesUnsupported(_))
        ));
    }
}
