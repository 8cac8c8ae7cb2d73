use super::{bisect, check_gamma, check_unit, EmaError, EmaSolution};
use crate::graphs::{DegreeDistribution, DegreeSpec};

/// Degree-resolvent sums at a saddle point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    /// `R_n = Σ_t b_t c_t^n / (φ − c_t â)`, `n = 1, 2, 3`.
    pub r: [f64; 3],
    /// `S_n = Σ_t b_t c_t^n / (φ − c_t â)²`.
    pub s: [f64; 3],
    pub x: [f64; 3],
    pub cbar: f64,
    pub c2bar: f64,
    pub c3bar: f64,
}

impl MomentSet {
    pub fn new(dist: &DegreeDistribution, phi: f64, a: f64, p1: f64, big_gamma: f64) -> Self {
        let a_hat = -a / (1.0 + a);
        let mut r = [0.0; 3];
        let mut s = [0.0; 3];
        for (c, b) in dist.iter() {
            let c = c as f64;
            let d = phi - c * a_hat;
            for k in 0..3 {
                let ck = c.powi(k as i32 + 1);
                r[k] += b * ck / d;
                s[k] += b * ck / (d * d);
            }
        }
        let cbar = dist.mean();
        let ratio = p1 / (1.0 - p1);
        let r1sq = r[0] * r[0];
        let x = [
            r1sq / cbar * (a * a + 2.0 * a + 2.0),
            ratio * (big_gamma / (1.0 + a)).powi(2),
            2.0 * r1sq / cbar * ratio * big_gamma / (1.0 + a),
        ];
        Self { r, s, x, cbar, c2bar: dist.moment(2), c3bar: dist.moment(3) }
    }

    /// Squared module-1 mean; negative values mean no symmetry-broken solution.
    pub fn m11_sq(&self) -> f64 {
        let [s1, s2, s3] = self.s;
        let [x1, x2, x3] = self.x;
        (x1 - s2) / ((s2 - s1) * x1 * x2 + (s1 * s3 - s2 * s2) * x2 - s1 * x3)
    }
}

/// `â = −a/(1+a)`, and `φ` solving `R1(φ, â) = c̄(1+a)/(a(a+2))`.
fn phi_of_a(dist: &DegreeDistribution, a: f64) -> f64 {
    let a_hat = -a / (1.0 + a);
    let cbar = dist.mean();
    let target = cbar * (1.0 + a) / (a * (a + 2.0));
    let floor = dist.min_degree() as f64 * a_hat;
    let r1 = |phi: f64| dist.iter().map(|(c, b)| b * c as f64 / (phi - c as f64 * a_hat)).sum::<f64>();
    let mut step = (a + 1.0).max(1.0);
    while r1(floor + step) > target {
        step *= 2.0;
    }
    bisect(floor, floor + step, |phi| if phi <= floor { f64::INFINITY } else { r1(phi) - target })
}

/// Residual of the `m11 ≠ 0` stationarity condition.
fn detectable_residual(dist: &DegreeDistribution, a: f64, big_gamma: f64) -> f64 {
    let m = MomentSet::new(dist, phi_of_a(dist, a), a, 0.5, big_gamma);
    big_gamma * (m.r[1] - m.r[0]) - m.cbar * (1.0 + a).powi(2) / (a * (a + 2.0))
}

/// Residual of the `m11 = 0` stationarity condition.
fn undetectable_residual(dist: &DegreeDistribution, a: f64) -> f64 {
    let m = MomentSet::new(dist, phi_of_a(dist, a), a, 0.5, 1.0);
    (1.0 + a).powi(2) + 1.0 - m.cbar * m.s[1] / (m.r[0] * m.r[0])
}

/// Smallest positive root, located on a logarithmic grid and refined by
/// bisection.
fn smallest_root(f: impl Fn(f64) -> f64, scale: f64) -> Option<f64> {
    const POINTS: usize = 1200;
    let (lo, hi) = (1e-9f64, 1e4 * scale.max(1.0));
    let ratio = (hi / lo).ln() / POINTS as f64;
    let mut prev_a = lo;
    let mut prev = f(lo);
    for k in 1..=POINTS {
        let a = lo * (ratio * k as f64).exp();
        let v = f(a);
        if v == 0.0 {
            return Some(a);
        }
        if prev.is_finite() && v.is_finite() && (prev < 0.0) != (v < 0.0) {
            return Some(bisect(prev_a, a, &f));
        }
        prev_a = a;
        prev = v;
    }
    None
}

/// Real roots of the bimodal quadratic in `u = (1+a)/Γ̄`, smaller first.
fn bimodal_roots(dist: &DegreeDistribution, big_gamma: f64) -> Result<Vec<f64>, EmaError> {
    let c1 = dist.degrees[0] as f64;
    let c2 = dist.degrees[1] as f64;
    let cbar = dist.mean();
    let c2bar = dist.moment(2);
    if big_gamma == 1.0 {
        return Ok(vec![cbar - 1.0]);
    }
    let qa = cbar;
    let qb = cbar - c2bar + c1 * c2 / (big_gamma - 1.0);
    let qc = c1 * c2 * (1.0 - cbar) / (big_gamma - 1.0);
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return Err(EmaError::NoRealRoot(disc));
    }
    let sq = disc.sqrt();
    // Stable pair of roots.
    let q = -0.5 * (qb + qb.signum() * sq);
    let mut roots = vec![q / qa, if q != 0.0 { qc / q } else { -qb / qa }];
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

pub fn ratiocut_ema(spec: &DegreeSpec, p1: f64, gamma: f64) -> Result<(EmaSolution, MomentSet), EmaError> {
    spec.validate().map_err(|e| EmaError::InvalidSpec(e.to_string()))?;
    ratiocut_ema_distribution(&spec.distribution(), p1, gamma)
}

/// [`ratiocut_ema`] on an explicit degree law. Two-class laws use the closed
/// form for `a`; others solve the closure numerically.
pub fn ratiocut_ema_distribution(
    dist: &DegreeDistribution,
    p1: f64,
    gamma: f64,
) -> Result<(EmaSolution, MomentSet), EmaError> {
    check_unit(p1)?;
    if dist.min_degree() < 1 {
        return Err(EmaError::InvalidSpec("degree zero class".into()));
    }
    let cbar = dist.mean();
    if cbar <= 2.0 {
        return Err(EmaError::InvalidSpec(format!("cbar = {cbar} <= 2")));
    }
    check_gamma(gamma, cbar, p1)?;
    let p2 = 1.0 - p1;
    let big_gamma = 1.0 - gamma / (cbar * p1 * p2);

    let detectable = if big_gamma > 0.0 {
        if dist.degrees.len() == 2 {
            let roots = bimodal_roots(dist, big_gamma)?;
            // The larger root is spurious.
            roots
                .first()
                .map(|&u| big_gamma * u - 1.0)
                .filter(|&a| a > 0.0)
                .map(|a| (a, bimodal_phi(dist, a, big_gamma).unwrap_or_else(|| phi_of_a(dist, a))))
        } else {
            smallest_root(|a| detectable_residual(dist, a, big_gamma), cbar)
                .map(|a| (a, phi_of_a(dist, a)))
        }
    } else {
        None
    };

    if let Some((a, phi)) = detectable {
        let m = MomentSet::new(dist, phi, a, p1, big_gamma);
        if m.x[0] > m.s[1] {
            let m11_sq = m.m11_sq().max(0.0);
            let bracket = cbar / (a * (a + 2.0)) * big_gamma
                - (m.r[1] - m.r[0]) / (1.0 + a).powi(2) * big_gamma * big_gamma;
            let lambda2 = p1 / p2 * m11_sq * bracket - phi;
            return Ok((
                EmaSolution {
                    a,
                    a_hat: -a / (1.0 + a),
                    phi,
                    psi: 0.0,
                    m11_sq,
                    m11_hat_sq: m11_sq * (big_gamma / (1.0 + a)).powi(2),
                    lambda2,
                    detectable: true,
                    gamma_param: big_gamma,
                },
                m,
            ));
        }
    }

    let a = smallest_root(|a| undetectable_residual(dist, a), cbar)
        .ok_or_else(|| EmaError::NewtonDiverged("no root of the m11 = 0 closure".into()))?;
    let phi = phi_of_a(dist, a);
    let m = MomentSet::new(dist, phi, a, p1, big_gamma);
    Ok((
        EmaSolution {
            a,
            a_hat: -a / (1.0 + a),
            phi,
            psi: 0.0,
            m11_sq: 0.0,
            m11_hat_sq: 0.0,
            lambda2: -phi,
            detectable: false,
            gamma_param: big_gamma,
        },
        m,
    ))
}

/// Closed form for `φ` on two-class laws; `None` where it degenerates to 0/0.
fn bimodal_phi(dist: &DegreeDistribution, a: f64, big_gamma: f64) -> Option<f64> {
    let c1 = dist.degrees[0] as f64;
    let c2 = dist.degrees[1] as f64;
    let cbar = dist.mean();
    let c2bar = dist.moment(2);
    let u = (1.0 + a) / big_gamma;
    let den = c2bar - cbar * (1.0 + u);
    if den.abs() < 1e-9 * c2bar {
        return None;
    }
    Some(c1 * c2 * a / (1.0 + a) * (u + 1.0 - cbar) / den)
}
