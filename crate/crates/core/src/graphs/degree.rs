use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::seq::SliceRandom;

use super::{BlockParams, GraphError};
use crate::seed::{self, tags};

const POISSON_TAIL: f64 = 1e-8;
const PARITY_ATTEMPTS: usize = 100;

/// Degree law of the ensemble.
#[derive(Debug, Clone, PartialEq)]
pub enum DegreeSpec {
    Regular { c: u32 },
    Bimodal { c1: u32, c2: u32, b1: f64 },
    /// Poisson(cbar) truncated to `[min_degree, cmax]`.
    Poisson { cbar: f64, min_degree: u32, cmax: u32 },
}

impl DegreeSpec {
    /// Poisson law truncated below at 1, with `cmax` chosen so the discarded
    /// upper tail has mass below 1e-8.
    pub fn poisson(cbar: f64) -> Self {
        DegreeSpec::Poisson { cbar, min_degree: 1, cmax: poisson_cmax(cbar) }
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        match *self {
            DegreeSpec::Regular { c } => {
                if c < 3 {
                    return Err(GraphError::InvalidSpec(format!("regular degree {c} < 3")));
                }
            }
            DegreeSpec::Bimodal { c1, c2, b1 } => {
                if c1 == c2 {
                    return Err(GraphError::InvalidSpec("bimodal degrees must differ".into()));
                }
                if c1 < 1 || c2 < 1 {
                    return Err(GraphError::InvalidSpec("bimodal degrees must be >= 1".into()));
                }
                if !(b1 > 0.0 && b1 < 1.0) {
                    return Err(GraphError::InvalidSpec(format!("b1 = {b1} outside (0, 1)")));
                }
            }
            DegreeSpec::Poisson { cbar, min_degree, cmax } => {
                if !(cbar > 0.0 && cbar.is_finite()) {
                    return Err(GraphError::InvalidSpec(format!("cbar = {cbar} not positive")));
                }
                if min_degree < 1 {
                    return Err(GraphError::InvalidSpec("min_degree must be >= 1".into()));
                }
                if cmax < min_degree {
                    return Err(GraphError::InvalidSpec("cmax < min_degree".into()));
                }
                let tail = poisson_upper_tail(cbar, cmax);
                if tail >= POISSON_TAIL {
                    return Err(GraphError::InvalidSpec(format!(
                        "cmax = {cmax} leaves tail mass {tail:e} >= 1e-8"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Degree classes and populations `b_t`.
    pub fn distribution(&self) -> DegreeDistribution {
        match *self {
            DegreeSpec::Regular { c } => DegreeDistribution::new(vec![c], vec![1.0]),
            DegreeSpec::Bimodal { c1, c2, b1 } => {
                DegreeDistribution::new(vec![c1, c2], vec![b1, 1.0 - b1])
            }
            DegreeSpec::Poisson { cbar, min_degree, cmax } => {
                let degrees: Vec<u32> = (min_degree..=cmax).collect();
                let logw: Vec<f64> = degrees.iter().map(|&k| poisson_ln_pmf(cbar, k)).collect();
                let top = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let w: Vec<f64> = logw.iter().map(|l| (l - top).exp()).collect();
                let z: f64 = w.iter().sum();
                DegreeDistribution::new(degrees, w.into_iter().map(|x| x / z).collect())
            }
        }
    }

    pub fn mean_degree(&self) -> f64 {
        self.distribution().mean()
    }

    /// Degree of the defect class: the lower-population class, or the lower
    /// degree when populations tie. Only bimodal laws have one.
    pub fn defect_and_background(&self) -> Option<(u32, u32)> {
        match *self {
            DegreeSpec::Bimodal { c1, c2, b1 } => {
                let b2 = 1.0 - b1;
                if b1 < b2 || (b1 == b2 && c1 < c2) {
                    Some((c1, c2))
                } else {
                    Some((c2, c1))
                }
            }
            _ => None,
        }
    }
}

impl fmt::Display for DegreeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            DegreeSpec::Regular { c } => write!(f, "regular:{c}"),
            DegreeSpec::Bimodal { c1, c2, b1 } => write!(f, "bimodal:{c1},{c2},{b1}"),
            DegreeSpec::Poisson { cbar, min_degree, cmax } => {
                write!(f, "poisson:{cbar},{min_degree},{cmax}")
            }
        }
    }
}

impl FromStr for DegreeSpec {
    type Err = GraphError;

    /// `regular:C`, `bimodal:C1,C2,B1`, `poisson:CBAR[,MIN[,CMAX]]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GraphError::InvalidSpec(format!("cannot parse degree spec '{s}'"));
        let (kind, rest) = s.trim().split_once(':').ok_or_else(bad)?;
        let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
        let int = |x: &str| x.parse::<u32>().map_err(|_| bad());
        let real = |x: &str| x.parse::<f64>().map_err(|_| bad());
        let spec = match (kind.trim().to_ascii_lowercase().as_str(), parts.as_slice()) {
            ("regular", [c]) => DegreeSpec::Regular { c: int(c)? },
            ("bimodal", [c1, c2, b1]) => {
                DegreeSpec::Bimodal { c1: int(c1)?, c2: int(c2)?, b1: real(b1)? }
            }
            ("poisson", [cbar]) => DegreeSpec::poisson(real(cbar)?),
            ("poisson", [cbar, min]) => {
                let cbar = real(cbar)?;
                DegreeSpec::Poisson { cbar, min_degree: int(min)?, cmax: poisson_cmax(cbar) }
            }
            ("poisson", [cbar, min, cmax]) => {
                DegreeSpec::Poisson { cbar: real(cbar)?, min_degree: int(min)?, cmax: int(cmax)? }
            }
            _ => return Err(bad()),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Finite degree law: classes `c_t` with populations `b_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    pub degrees: Vec<u32>,
    pub weights: Vec<f64>,
}

impl DegreeDistribution {
    pub fn new(degrees: Vec<u32>, weights: Vec<f64>) -> Self {
        assert_eq!(degrees.len(), weights.len());
        Self { degrees, weights }
    }

    /// `Σ_t b_t c_t^k`.
    pub fn moment(&self, k: i32) -> f64 {
        self.iter().map(|(c, b)| b * (c as f64).powi(k)).sum()
    }

    pub fn mean(&self) -> f64 {
        self.moment(1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.degrees.iter().copied().zip(self.weights.iter().copied())
    }

    /// Excess-degree weights `b_t c_t / c̄`.
    pub fn excess_weights(&self) -> Vec<f64> {
        let m = self.mean();
        self.iter().map(|(c, b)| b * c as f64 / m).collect()
    }

    /// `ln Σ_t b_t c_t!`, evaluated without overflow.
    pub fn ln_mean_factorial(&self) -> f64 {
        let terms: Vec<f64> = self
            .iter()
            .filter(|&(_, b)| b > 0.0)
            .map(|(c, b)| b.ln() + ln_factorial(c))
            .collect();
        let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln()
    }

    pub fn min_degree(&self) -> u32 {
        self.iter().filter(|&(_, b)| b > 0.0).map(|(c, _)| c).min().unwrap_or(0)
    }
}

pub(crate) fn ln_factorial(k: u32) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

fn poisson_ln_pmf(cbar: f64, k: u32) -> f64 {
    -cbar + k as f64 * cbar.ln() - ln_factorial(k)
}

/// `P(X > cmax)` for `X ~ Poisson(cbar)`.
fn poisson_upper_tail(cbar: f64, cmax: u32) -> f64 {
    let mut tail = 0.0;
    let mut k = cmax + 1;
    loop {
        let p = poisson_ln_pmf(cbar, k).exp();
        tail += p;
        if (k as f64) > cbar && p < 1e-18 * tail.max(1e-300) {
            break;
        }
        if p == 0.0 && (k as f64) > cbar {
            break;
        }
        k += 1;
    }
    tail
}

fn poisson_cmax(cbar: f64) -> u32 {
    let mut k = cbar.ceil().max(1.0) as u32;
    while poisson_upper_tail(cbar, k) >= POISSON_TAIL {
        k += 1;
    }
    k
}

/// Largest-remainder apportionment of `total` across `weights`; ties go to
/// the earlier index.
pub(crate) fn largest_remainder(total: usize, weights: &[f64]) -> Vec<usize> {
    let sum: f64 = weights.iter().sum();
    let quotas: Vec<f64> = weights.iter().map(|w| w / sum * total as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&i, &j| {
        let ri = quotas[i] - quotas[i].floor();
        let rj = quotas[j] - quotas[j].floor();
        rj.partial_cmp(&ri).unwrap().then(i.cmp(&j))
    });
    for &i in order.iter().take(total.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

/// Per-vertex degrees aligned with [`super::planted_labels`].
///
/// Regular and bimodal counts per module follow largest-remainder rounding of
/// `b_t N_r`; Poisson degrees are drawn independently. The stub count of every
/// module must have the parity of `round(γn)`: a bimodal module is repaired by
/// moving one vertex from its larger class to the other, a Poisson module by
/// redrawing single degrees.
pub fn sample_degree_sequence(
    spec: &DegreeSpec,
    params: &BlockParams,
    seed: u64,
) -> Result<Vec<u32>, GraphError> {
    spec.validate()?;
    params.validate(spec)?;
    let sizes = params.module_sizes();
    let x = params.cross_edges();
    let dist = spec.distribution();
    let mut rng = seed::stream(seed, tags::DEGREES);
    let mut out = Vec::with_capacity(params.n);

    for (r, &size) in sizes.iter().enumerate() {
        let mut degs: Vec<u32> = match spec {
            DegreeSpec::Poisson { .. } => {
                let cdf = cumulative(&dist.weights);
                (0..size).map(|_| dist.degrees[draw(&cdf, rng.gen::<f64>())]).collect()
            }
            _ => {
                let counts = largest_remainder(size, &dist.weights);
                dist.degrees
                    .iter()
                    .zip(&counts)
                    .flat_map(|(&c, &k)| std::iter::repeat(c).take(k))
                    .collect()
            }
        };
        let parity_ok = |d: &[u32]| (d.iter().map(|&c| c as u64).sum::<u64>() + x as u64) % 2 == 0;
        if size > 0 && !parity_ok(&degs) {
            match *spec {
                DegreeSpec::Regular { .. } => {
                    return Err(GraphError::ParityUnrepairable { module: r + 1, attempts: 0 });
                }
                DegreeSpec::Bimodal { c1, c2, .. } => {
                    if (c1 + c2) % 2 == 0 {
                        return Err(GraphError::ParityUnrepairable { module: r + 1, attempts: 1 });
                    }
                    let n1 = degs.iter().filter(|&&c| c == c1).count();
                    let (from, to) = if n1 * 2 >= degs.len() { (c1, c2) } else { (c2, c1) };
                    let i = degs.iter().position(|&c| c == from).expect("class present");
                    degs[i] = to;
                }
                DegreeSpec::Poisson { .. } => {
                    let cdf = cumulative(&dist.weights);
                    let mut fixed = false;
                    for _ in 0..PARITY_ATTEMPTS {
                        let i = rng.gen_range(0..degs.len());
                        degs[i] = dist.degrees[draw(&cdf, rng.gen::<f64>())];
                        if parity_ok(&degs) {
                            fixed = true;
                            break;
                        }
                    }
                    if !fixed {
                        return Err(GraphError::ParityUnrepairable {
                            module: r + 1,
                            attempts: PARITY_ATTEMPTS,
                        });
                    }
                }
            }
        }
        degs.shuffle(&mut rng);
        out.extend(degs);
    }
    Ok(out)
}

pub(crate) fn cumulative(weights: &[f64]) -> Vec<f64> {
    let total: f64 = weights.iter().sum();
    let mut acc = 0.0;
    let mut cdf: Vec<f64> = weights
        .iter()
        .map(|w| {
            acc += w / total;
            acc
        })
        .collect();
    if let Some(last) = cdf.last_mut() {
        *last = 1.0;
    }
    cdf
}

#[inline]
pub(crate) fn draw(cdf: &[f64], u: f64) -> usize {
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn largest_remainder_sums() {
        assert_eq!(largest_remainder(10, &[1.0, 1.0, 1.0]), vec![4, 3, 3]);
        assert_eq!(largest_remainder(6000, &[0.1, 0.9]), vec![600, 5400]);
    }

    #[test]
    fn poisson_cmax_tail() {
        for &c in &[1.0, 6.0, 8.0, 20.0] {
            let k = poisson_cmax(c);
            assert!(poisson_upper_tail(c, k) < POISSON_TAIL);
            assert!(poisson_upper_tail(c, k - 1) >= POISSON_TAIL);
        }
    }

    #[test]
    fn mean_factorial_bimodal() {
        let d = DegreeSpec::Bimodal { c1: 3, c2: 6, b1: 0.5 }.distribution();
        assert!((d.ln_mean_factorial() - 363f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn parse_round_trip() {
        for s in ["regular:3", "bimodal:3,9,0.1", "poisson:6"] {
            let spec: DegreeSpec = s.parse().unwrap();
            let again: DegreeSpec = spec.to_string().parse().unwrap();
            assert_eq!(spec, again);
        }
        assert!("regular:2".parse::<DegreeSpec>().is_err());
        assert!("bimodal:3,3,0.5".parse::<DegreeSpec>().is_err());
    }

    #[test]
    fn defect_class() {
        let d = DegreeSpec::Bimodal { c1: 3, c2: 9, b1: 0.9 };
        assert_eq!(d.defect_and_background(), Some((9, 3)));
        let d = DegreeSpec::Bimodal { c1: 6, c2: 3, b1: 0.5 };
        assert_eq!(d.defect_and_background(), Some((3, 6)));
    }
}
