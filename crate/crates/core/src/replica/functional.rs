//! Monte Carlo evaluation of the extremized free-energy functional.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{combine, CavityField, Params, PdConfig, PdError, PdModel, PdResult};
use crate::seed::{stream, tags};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lambda2Estimate {
    pub value: f64,
    pub std_error: f64,
}

/// Running mean and variance.
#[derive(Default)]
struct Acc {
    n: f64,
    sum: f64,
    sq: f64,
}

impl Acc {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        self.sum += x;
        self.sq += x * x;
    }
    fn mean(&self) -> f64 {
        self.sum / self.n
    }
    /// Variance of the mean.
    fn var_mean(&self) -> f64 {
        let m = self.mean();
        ((self.sq / self.n - m * m).max(0.0)) / self.n
    }
}

fn xi(f: CavityField, g: CavityField) -> f64 {
    let (a, h, a2, h2) = (f.a, f.h, g.a, g.h);
    ((1.0 + a2) * h * h + (1.0 + a) * h2 * h2 + 2.0 * h * h2) / ((1.0 + a) * (1.0 + a2) - 1.0)
        - h * h / a
        - h2 * h2 / a2
}

fn pick(v: &[CavityField], rng: &mut ChaCha8Rng) -> CavityField {
    v[rng.gen_range(0..v.len())]
}

/// `λ2` from the functional at the converged populations, using `pairs`
/// random draws for each of its integrals. For `𝓛` the value is divided by
/// `c̄`.
pub fn evaluate_lambda2(result: &PdResult, config: &PdConfig, pairs: usize) -> Result<Lambda2Estimate, PdError> {
    let pop = &result.population;
    if pop.size() == 0 || pairs == 0 {
        return Err(PdError::EmptyPopulation);
    }
    let params = Params::new(config);
    let mut rng = stream(config.seed, tags::PD_FUNCTIONAL);
    let (p, cbar, gamma, phi) = (params.p, params.cbar, params.gamma, result.phi);

    // Ξ over module pairs with weights ½(c̄p_r − γ) on the diagonal and γ across.
    let k = [[(cbar * p[0] - gamma) / 2.0, gamma], [0.0, (cbar * p[1] - gamma) / 2.0]];
    let mut value = 0.0;
    let mut var = 0.0;
    for (r, s) in [(0, 0), (0, 1), (1, 1)] {
        let mut acc = Acc::default();
        for _ in 0..pairs {
            acc.push(xi(pick(&pop.cavity[r], &mut rng), pick(&pop.cavity[s], &mut rng)));
        }
        value += k[r][s] * acc.mean();
        var += k[r][s].powi(2) * acc.var_mean();
    }
    for r in 0..2 {
        let mut cross = Acc::default();
        for _ in 0..pairs {
            let f = pick(&pop.cavity[r], &mut rng);
            let g = pick(&pop.conjugate[r], &mut rng);
            cross.push((f.h + g.h).powi(2) / (f.a - g.a) - f.h * f.h / f.a);
        }
        value -= cbar * p[r] * cross.mean();
        var += (cbar * p[r]).powi(2) * cross.var_mean();

        let mut marg = Acc::default();
        for _ in 0..pairs {
            let c = params.degree(&mut rng);
            let m = combine(&pop.conjugate[r], c, params.phi_coefficient(c) * phi, &mut rng);
            marg.push(m.h * m.h / m.a);
        }
        value += p[r] * marg.mean();
        var += p[r].powi(2) * marg.var_mean();
    }
    let scale = match config.model {
        PdModel::GeneralNcut => cbar,
        _ => 1.0,
    };
    value += scale * phi;
    Ok(Lambda2Estimate { value: -value / scale, std_error: var.sqrt() / scale })
}
