use super::{BlockParams, DegreeSpec, GraphError};

/// Large-`N` ensemble size and its saddle-point order parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleCount {
    /// `ln 𝒩_G`.
    pub log_count: f64,
    pub q1: f64,
    pub q2: f64,
    /// Multiplier of the cross-edge constraint; `+∞` at `γ = 0`.
    pub eta: f64,
}

fn xlnx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Asymptotic count of two-block graphs with the given degree law and exactly
/// `γN` cross edges.
pub fn log_count_graphs(spec: &DegreeSpec, params: &BlockParams) -> Result<EnsembleCount, GraphError> {
    spec.validate()?;
    let n = params.n as f64;
    let (p1, p2, gamma) = (params.p1, params.p2(), params.gamma);
    if !(p1 > 0.0 && p1 < 1.0) || gamma < 0.0 {
        return Err(GraphError::InvalidParams(format!("p1 = {p1}, gamma = {gamma}")));
    }
    let dist = spec.distribution();
    let cbar = dist.mean();
    let k1 = cbar * p1 - gamma;
    let k2 = cbar * p2 - gamma;
    if k1 <= 0.0 || k2 <= 0.0 {
        return Err(GraphError::InvalidRegion(format!(
            "cbar*p_r - gamma must be positive, got {k1} and {k2}"
        )));
    }
    let density = 0.5 * cbar * (n.ln() - 1.0) - dist.ln_mean_factorial() - xlnx(gamma)
        + xlnx(cbar * p1)
        + xlnx(cbar * p2)
        - 0.5 * xlnx(k1)
        - 0.5 * xlnx(k2);
    let q1 = (k1 / (n * p1 * p1)).sqrt();
    let q2 = (k2 / (n * p2 * p2)).sqrt();
    let eta = (n * p1 * p2 * q1 * q2 / gamma).ln();
    Ok(EnsembleCount { log_count: n * density, q1, q2, eta })
}
