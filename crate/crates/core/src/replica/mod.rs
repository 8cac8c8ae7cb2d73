//! Population dynamics for the replica-symmetric cavity equations.
//!
//! Each module keeps `P` cavity fields `(A, H)` and `P` conjugate fields
//! `(Â, Ĥ)`. A sweep refreshes all conjugates from the previous cavities and
//! then all cavities from the new conjugates. The `H`-part of the update is
//! linear, so after every sweep the fields are shifted to restore
//! orthogonality to the trivial mode and rescaled to unit norm; the rescale
//! factor `Λ(φ)` equals one at the saddle point, which is located by
//! bisection in `φ`. The eigenvalue estimate is `λ2 = −φ*`.

mod functional;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::graphs::{cumulative, draw, DegreeSpec};
use crate::seed::{mix, stream, tags};

pub use functional::{evaluate_lambda2, Lambda2Estimate};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum PdError {
    #[error("invalid population-dynamics configuration: {0}")]
    InvalidConfig(String),
    #[error("cavity field left the stable range at phi = {phi}")]
    UnstableField { phi: f64 },
    #[error("no sign change of the growth factor: {0}")]
    BisectionFailed(String),
    #[error("population dynamics did not converge: {0}")]
    NonConvergence(String),
    #[error("empty population")]
    EmptyPopulation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityField {
    pub a: f64,
    pub h: f64,
}

impl CavityField {
    /// Conjugate `(Â, Ĥ) = (−A/(1+A), H/(1+A))`.
    #[inline]
    pub fn conjugate(self) -> Option<CavityField> {
        let d = 1.0 + self.a;
        (d > 0.0).then(|| CavityField { a: -self.a / d, h: self.h / d })
    }

    #[inline]
    pub fn x(self) -> f64 {
        self.h / self.a
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdModel {
    RegularL,
    GeneralL,
    GeneralNcut,
}

impl fmt::Display for PdModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PdModel::RegularL => "regular-l",
            PdModel::GeneralL => "general-l",
            PdModel::GeneralNcut => "general-ncut",
        })
    }
}

impl FromStr for PdModel {
    type Err = PdError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "regular-l" | "regular" => Ok(PdModel::RegularL),
            "general-l" | "l" => Ok(PdModel::GeneralL),
            "general-ncut" | "ncut" => Ok(PdModel::GeneralNcut),
            other => Err(PdError::InvalidConfig(format!("unknown model {other:?}"))),
        }
    }
}

/// Initial `H` of the cavity fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HInit {
    /// `+1` in module 1, `−1` in module 2.
    ModuleSign,
    /// Standard normal, blind to the modules.
    Gaussian,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PdConfig {
    /// Fields per module.
    pub population_size: usize,
    pub equilibration_sweeps: usize,
    pub measurement_sweeps: usize,
    /// Sweeps per growth-factor evaluation during the `φ` search.
    pub tuning_sweeps: usize,
    pub phi_bisection_tolerance: f64,
    /// Marginal snapshots kept from the end of the measurement phase.
    pub snapshots: usize,
    pub model: PdModel,
    pub spec: DegreeSpec,
    pub p1: f64,
    pub gamma: f64,
    pub seed: u64,
    pub h_init: HInit,
}

impl PdConfig {
    pub fn new(model: PdModel, spec: DegreeSpec, p1: f64, gamma: f64, seed: u64) -> Self {
        Self {
            population_size: 100_000,
            equilibration_sweeps: 200,
            measurement_sweeps: 200,
            tuning_sweeps: 60,
            phi_bisection_tolerance: 1e-6,
            snapshots: 10,
            model,
            spec,
            p1,
            gamma,
            seed,
            h_init: HInit::ModuleSign,
        }
    }

    pub fn validate(&self) -> Result<(), PdError> {
        let bad = |m: String| Err(PdError::InvalidConfig(m));
        if self.population_size < 1000 {
            return bad(format!("population size {} < 1000", self.population_size));
        }
        if !(self.phi_bisection_tolerance > 0.0) {
            return bad("tolerance must be positive".into());
        }
        if self.tuning_sweeps < 2 || self.measurement_sweeps == 0 {
            return bad("need at least 2 tuning sweeps and 1 measurement sweep".into());
        }
        self.spec.validate().map_err(|e| PdError::InvalidConfig(e.to_string()))?;
        if self.model == PdModel::RegularL && !matches!(self.spec, DegreeSpec::Regular { .. }) {
            return bad("regular-l requires a regular degree spec".into());
        }
        if !(self.p1 > 0.0 && self.p1 < 1.0) {
            return bad(format!("p1 = {} outside (0,1)", self.p1));
        }
        let cbar = self.spec.mean_degree();
        let limit = cbar * self.p1.min(1.0 - self.p1);
        if !(self.gamma >= 0.0) || self.gamma > limit {
            return bad(format!("gamma = {} outside [0, {limit}]", self.gamma));
        }
        Ok(())
    }
}

/// Cavity and conjugate populations of both modules.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub cavity: [Vec<CavityField>; 2],
    pub conjugate: [Vec<CavityField>; 2],
}

impl Population {
    pub fn size(&self) -> usize {
        self.cavity[0].len()
    }

    fn reset_variances(&mut self, a: f64) {
        for r in 0..2 {
            for f in &mut self.cavity[r] {
                f.a = a;
            }
        }
    }

    fn initial(config: &PdConfig, rng: &mut ChaCha8Rng) -> Self {
        let a = config.spec.mean_degree();
        let p = config.population_size;
        let mut field = |r: usize| {
            let h = match config.h_init {
                HInit::ModuleSign => {
                    if r == 0 {
                        1.0
                    } else {
                        -1.0
                    }
                }
                HInit::Gaussian => rng.sample::<f64, _>(StandardNormal),
            };
            CavityField { a, h }
        };
        let c0: Vec<_> = (0..p).map(|_| field(0)).collect();
        let c1: Vec<_> = (0..p).map(|_| field(1)).collect();
        let conj = |v: &Vec<CavityField>| v.iter().map(|f| f.conjugate().unwrap()).collect();
        Population { conjugate: [conj(&c0), conj(&c1)], cavity: [c0, c1] }
    }
}

/// Variance field above every fixed point of the `A`-map for `φ ≤ 0`; the
/// map is monotone, so iterating from here descends to the largest fixed
/// point when one exists.
fn start_variance(config: &PdConfig) -> f64 {
    let dist = config.spec.distribution();
    dist.iter().map(|(c, _)| c).max().unwrap_or(1) as f64
}

/// Sampling tables shared by every sweep.
#[derive(Debug, Clone)]
pub(crate) struct Params {
    pub model: PdModel,
    pub p: [f64; 2],
    pub gamma: f64,
    pub cbar: f64,
    degrees: Vec<u32>,
    degree_cdf: Vec<f64>,
    excess_cdf: Vec<f64>,
}

impl Params {
    pub(crate) fn new(config: &PdConfig) -> Self {
        let dist = config.spec.distribution();
        Self {
            model: config.model,
            p: [config.p1, 1.0 - config.p1],
            gamma: config.gamma,
            cbar: dist.mean(),
            degrees: dist.iter().map(|(c, _)| c).collect(),
            degree_cdf: cumulative(&dist.iter().map(|(_, b)| b).collect::<Vec<_>>()),
            excess_cdf: cumulative(&dist.excess_weights()),
        }
    }

    /// Probability that a conjugate field of module `r` comes from the other module.
    pub(crate) fn cross_weight(&self, r: usize) -> f64 {
        self.gamma / (self.cbar * self.p[r])
    }

    #[inline]
    pub(crate) fn degree(&self, rng: &mut ChaCha8Rng) -> u32 {
        self.degrees[draw(&self.degree_cdf, rng.gen())]
    }

    #[inline]
    fn excess_degree(&self, rng: &mut ChaCha8Rng) -> u32 {
        self.degrees[draw(&self.excess_cdf, rng.gen())]
    }

    /// Coefficient of `φ` in a field with `c` conjugate neighbours.
    #[inline]
    pub(crate) fn phi_coefficient(&self, c: u32) -> f64 {
        match self.model {
            PdModel::GeneralNcut => c as f64,
            _ => 1.0,
        }
    }

    /// Weight of a vertex of degree `c` in the constraints.
    #[inline]
    fn constraint_weight(&self, c: u32) -> f64 {
        match self.model {
            PdModel::GeneralNcut => c as f64,
            _ => 1.0,
        }
    }
}

#[inline]
fn pick(v: &[CavityField], rng: &mut ChaCha8Rng) -> CavityField {
    v[rng.gen_range(0..v.len())]
}

/// Field built from `k` conjugates of `conj`: `A = coef·φ − ΣÂ`, `H = ΣĤ`.
#[inline]
fn combine(conj: &[CavityField], k: u32, coef_phi: f64, rng: &mut ChaCha8Rng) -> CavityField {
    let mut a = coef_phi;
    let mut h = 0.0;
    for _ in 0..k {
        let f = pick(conj, rng);
        a -= f.a;
        h += f.h;
    }
    CavityField { a, h }
}

/// One synchronous refresh of all conjugate and cavity fields.
pub fn cavity_sweep(
    pop: &Population,
    config: &PdConfig,
    phi: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Population, PdError> {
    sweep(pop, &Params::new(config), phi, rng)
}

fn sweep(pop: &Population, params: &Params, phi: f64, rng: &mut ChaCha8Rng) -> Result<Population, PdError> {
    let n = pop.size();
    let mut budget = RareFailures::new(n, phi);
    let mut conjugate: [Vec<CavityField>; 2] = [Vec::with_capacity(n), Vec::with_capacity(n)];
    for (r, out) in conjugate.iter_mut().enumerate() {
        let w = params.cross_weight(r);
        while out.len() < n {
            let src = if rng.gen::<f64>() < w { 1 - r } else { r };
            match pick(&pop.cavity[src], rng).conjugate() {
                Some(f) => out.push(f),
                None => budget.spend()?,
            }
        }
    }
    let mut cavity: [Vec<CavityField>; 2] = [Vec::with_capacity(n), Vec::with_capacity(n)];
    for (r, out) in cavity.iter_mut().enumerate() {
        while out.len() < n {
            let c = params.excess_degree(rng);
            let f = combine(&conjugate[r], c - 1, params.phi_coefficient(c) * phi, rng);
            if 1.0 + f.a > 0.0 {
                out.push(f);
            } else {
                budget.spend()?;
            }
        }
    }
    Ok(Population { cavity, conjugate })
}

/// Isolated unstable draws come from rare finite branches (dangling paths
/// and the like) and are redrawn; more than one per hundred fields per
/// sweep means `φ` itself is out of range.
struct RareFailures {
    left: usize,
    phi: f64,
}

impl RareFailures {
    fn new(n: usize, phi: f64) -> Self {
        Self { left: n / 100, phi }
    }

    fn spend(&mut self) -> Result<(), PdError> {
        if self.left == 0 {
            return Err(PdError::UnstableField { phi: self.phi });
        }
        self.left -= 1;
        Ok(())
    }
}

/// Complete marginals `Q_r`, one per population slot, with their degrees.
pub(crate) fn marginals(
    pop: &Population,
    params: &Params,
    phi: f64,
    rng: &mut ChaCha8Rng,
) -> Result<[Vec<(CavityField, u32)>; 2], PdError> {
    let n = pop.size();
    let mut budget = RareFailures::new(n, phi);
    let mut out: [Vec<(CavityField, u32)>; 2] = [Vec::with_capacity(n), Vec::with_capacity(n)];
    for (r, o) in out.iter_mut().enumerate() {
        while o.len() < n {
            let c = params.degree(rng);
            let f = combine(&pop.conjugate[r], c, params.phi_coefficient(c) * phi, rng);
            if f.a > 0.0 && f.x().is_finite() {
                o.push((f, c));
            } else {
                budget.spend()?;
            }
        }
    }
    Ok(out)
}

/// Weighted first and second moments of `x = H/A` for the constraints,
/// `(Σ p ⟨w x⟩, Σ p ⟨w x²⟩) / Σ p ⟨w⟩`.
fn constraint_moments(marg: &[Vec<(CavityField, u32)>; 2], params: &Params) -> (f64, f64) {
    let (mut s1, mut s2, mut sw) = (0.0, 0.0, 0.0);
    for r in 0..2 {
        let n = marg[r].len() as f64;
        let (mut a1, mut a2, mut aw) = (0.0, 0.0, 0.0);
        for &(f, c) in &marg[r] {
            let w = params.constraint_weight(c);
            let x = f.x();
            a1 += w * x;
            a2 += w * x * x;
            aw += w;
        }
        s1 += params.p[r] * a1 / n;
        s2 += params.p[r] * a2 / n;
        sw += params.p[r] * aw / n;
    }
    (s1 / sw, s2 / sw)
}

/// Shift `H → H − m A` then scale by `s` in every population.
fn project(pop: &mut Population, marg: &mut [Vec<(CavityField, u32)>; 2], m: f64, s: f64) {
    for r in 0..2 {
        for f in &mut pop.cavity[r] {
            f.h = (f.h - m * f.a) * s;
        }
        for f in &mut pop.conjugate[r] {
            f.h = (f.h + m * f.a) * s;
        }
        for (f, _) in &mut marg[r] {
            f.h = (f.h - m * f.a) * s;
        }
    }
}

/// Median of `|x − m|` over both modules.
fn median_deviation(marg: &[Vec<(CavityField, u32)>; 2], m: f64) -> f64 {
    let mut d: Vec<f64> = marg.iter().flatten().map(|(f, _)| (f.x() - m).abs()).collect();
    let k = d.len() / 2;
    *d.select_nth_unstable_by(k, f64::total_cmp).1
}

/// Sweep, project and normalize. Returns the growth factor of the sweep,
/// measured on the median element magnitude: the second moment of the
/// marginals is heavy-tailed when the degree fluctuates, the median is not,
/// and the linear `H`-map has one growth rate under any norm. `reference`
/// carries the median after the previous normalization; the first sweep
/// reports NaN.
fn step(
    pop: &mut Population,
    params: &Params,
    phi: f64,
    rng: &mut ChaCha8Rng,
    reference: &mut f64,
) -> Result<(f64, [Vec<(CavityField, u32)>; 2]), PdError> {
    *pop = sweep(pop, params, phi, rng)?;
    let mut marg = marginals(pop, params, phi, rng)?;
    let (m, second) = constraint_moments(&marg, params);
    // Second moment after removing the trivial-mode component.
    let norm2 = second - m * m;
    if !(norm2 > 0.0) || !norm2.is_finite() {
        return Err(PdError::NonConvergence(format!("marginal norm {norm2} at phi = {phi}")));
    }
    let median = median_deviation(&marg, m);
    let growth = median / *reference;
    let scale = 1.0 / norm2.sqrt();
    *reference = median * scale;
    project(pop, &mut marg, m, scale);
    Ok((growth, marg))
}

/// Largest mean growth accepted over the measurement sweeps.
const DRIFT_TOLERANCE: f64 = 0.01;

fn sweep_rng(seed: u64, stage: u64, index: u64) -> ChaCha8Rng {
    stream(mix(seed, &[stage, index]), tags::PD_SWEEP)
}

/// Geometric-mean growth over the second half of `sweeps` sweeps at `φ`.
fn growth_factor(
    pop: &mut Population,
    params: &Params,
    phi: f64,
    sweeps: usize,
    seed: u64,
    stage: u64,
) -> Result<f64, PdError> {
    let mut log_sum = 0.0;
    let mut count = 0;
    let mut reference = f64::NAN;
    for k in 0..sweeps {
        let mut rng = sweep_rng(seed, stage, k as u64);
        let (g, _) = step(pop, params, phi, &mut rng, &mut reference)?;
        if k >= sweeps / 2 {
            log_sum += g.ln();
            count += 1;
        }
    }
    Ok((log_sum / count as f64).exp())
}

/// Lower end of the `φ` search interval.
fn phi_floor(config: &PdConfig) -> f64 {
    match config.model {
        PdModel::GeneralNcut => -1.0,
        _ => -(config.spec.distribution().min_degree() as f64),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PdResult {
    pub phi: f64,
    pub psi: f64,
    pub lambda2: f64,
    /// Mean growth factor over the measurement sweeps, one at the saddle.
    pub growth: f64,
    /// Complete marginals `(A, H)` and degrees from the last snapshots.
    pub marginal_population: [Vec<CavityField>; 2],
    pub marginal_degrees: [Vec<u32>; 2],
    /// Final cavity and conjugate populations.
    pub population: Population,
    pub m1: [f64; 2],
    pub m2: [f64; 2],
    pub m1_hat: [f64; 2],
    pub m2_hat: [f64; 2],
    pub fraction_correct: f64,
    pub orthogonality_residual: f64,
    pub normalization_residual: f64,
    pub model: PdModel,
    pub p1: f64,
    pub gamma: f64,
    pub cbar: f64,
}

/// Solve the cavity equations for `config`.
pub fn run_population_dynamics(config: &PdConfig) -> Result<PdResult, PdError> {
    config.validate()?;
    let params = Params::new(config);
    let a_start = start_variance(config);
    let mut init_rng = stream(config.seed, tags::PD_INIT);
    let mut good = Population::initial(config, &mut init_rng);

    let mut lo = phi_floor(config);
    // Just below zero: leaf cavities have A = 0 at φ = 0 exactly.
    let mut hi = -1e-12;
    let mut stage = 0u64;
    let eval = |phi: f64, good: &mut Population, stage: &mut u64| -> Option<f64> {
        *stage += 1;
        let mut trial = good.clone();
        trial.reset_variances(a_start);
        let gf = growth_factor(&mut trial, &params, phi, config.tuning_sweeps, config.seed, *stage);
        match gf {
            Ok(g) => {
                *good = trial;
                Some(g)
            }
            Err(_) => None,
        }
    };

    let phi_star = if config.gamma == 0.0 {
        0.0
    } else {
        match eval(hi, &mut good, &mut stage) {
            Some(g) if g < 1.0 => {}
            Some(g) => {
                return Err(PdError::BisectionFailed(format!("growth {g} >= 1 at phi = 0")));
            }
            None => return Err(PdError::BisectionFailed("unstable at phi = 0".into())),
        }
        if let Some(g) = eval(lo, &mut good, &mut stage) {
            if g < 1.0 {
                return Err(PdError::BisectionFailed(format!("growth {g} < 1 at phi = {lo}")));
            }
        }
        while hi - lo > config.phi_bisection_tolerance {
            let mid = 0.5 * (lo + hi);
            match eval(mid, &mut good, &mut stage) {
                Some(g) if g < 1.0 => hi = mid,
                _ => lo = mid,
            }
        }
        hi
    };

    // Close to the band edge the bisection can settle on a φ whose
    // instability only shows after the tuning window; step back until the
    // longer measurement run stays stable.
    let mut phi = phi_star;
    let mut back = config.phi_bisection_tolerance;
    for attempt in 0..30u64 {
        let mut start = good.clone();
        start.reset_variances(a_start);
        match measure(config, &params, start, phi, stage + 1 + 2 * attempt) {
            Err(PdError::UnstableField { .. }) if phi + back < 0.0 => {
                phi += back;
                back *= 2.0;
            }
            other => return other,
        }
    }
    Err(PdError::NonConvergence(format!("no stable measurement above phi = {phi_star}")))
}

fn measure(
    config: &PdConfig,
    params: &Params,
    mut pop: Population,
    phi: f64,
    stage: u64,
) -> Result<PdResult, PdError> {
    let mut reference = f64::NAN;
    for k in 0..config.equilibration_sweeps {
        let mut rng = sweep_rng(config.seed, stage, k as u64);
        step(&mut pop, params, phi, &mut rng, &mut reference)?;
    }
    let mut m1 = [0.0; 2];
    let mut m2 = [0.0; 2];
    let mut m1_hat = [0.0; 2];
    let mut m2_hat = [0.0; 2];
    let mut log_growth = 0.0;
    let mut growth_count = 0usize;
    let keep_from = config.measurement_sweeps.saturating_sub(config.snapshots.max(1));
    let mut kept: [Vec<(CavityField, u32)>; 2] = [Vec::new(), Vec::new()];
    for k in 0..config.measurement_sweeps {
        let mut rng = sweep_rng(config.seed, stage + 1, k as u64);
        let (g, marg) = step(&mut pop, params, phi, &mut rng, &mut reference)?;
        if g.is_finite() {
            log_growth += g.ln();
            growth_count += 1;
        }
        for r in 0..2 {
            let n = pop.size() as f64;
            m1[r] += pop.cavity[r].iter().map(|f| f.h).sum::<f64>() / n;
            m2[r] += pop.cavity[r].iter().map(|f| f.h * f.h).sum::<f64>() / n;
            m1_hat[r] += pop.conjugate[r].iter().map(|f| f.h).sum::<f64>() / n;
            m2_hat[r] += pop.conjugate[r].iter().map(|f| f.h * f.h).sum::<f64>() / n;
        }
        if k >= keep_from {
            for r in 0..2 {
                kept[r].extend_from_slice(&marg[r]);
            }
        }
    }
    let sweeps = config.measurement_sweeps as f64;
    let growth = (log_growth / growth_count.max(1) as f64).exp();
    if growth > 1.0 + DRIFT_TOLERANCE {
        // Variances still drifting: φ sits just beyond the stable range.
        return Err(PdError::UnstableField { phi });
    }
    for v in [&mut m1, &mut m2, &mut m1_hat, &mut m2_hat] {
        for x in v.iter_mut() {
            *x /= sweeps;
        }
    }

    // Orient module 1 towards positive elements.
    let mean1 = kept[0].iter().map(|(f, _)| f.x()).sum::<f64>() / kept[0].len() as f64;
    if mean1 < 0.0 {
        for r in 0..2 {
            for (f, _) in &mut kept[r] {
                f.h = -f.h;
            }
            for f in pop.cavity[r].iter_mut().chain(pop.conjugate[r].iter_mut()) {
                f.h = -f.h;
            }
            m1[r] = -m1[r];
            m1_hat[r] = -m1_hat[r];
        }
    }

    let (ortho, norm) = constraint_moments(&kept, params);
    let fraction_correct = sign_fraction(&kept, params.p);
    let split = |v: &Vec<(CavityField, u32)>| -> (Vec<CavityField>, Vec<u32>) { v.iter().copied().unzip() };
    let (f0, d0) = split(&kept[0]);
    let (f1, d1) = split(&kept[1]);
    Ok(PdResult {
        phi,
        psi: 0.0,
        lambda2: 0.0 - phi,
        growth,
        marginal_population: [f0, f1],
        marginal_degrees: [d0, d1],
        population: pop,
        m1,
        m2,
        m1_hat,
        m2_hat,
        fraction_correct,
        orthogonality_residual: ortho.abs(),
        normalization_residual: (norm - 1.0).abs(),
        model: config.model,
        p1: config.p1,
        gamma: config.gamma,
        cbar: params.cbar,
    })
}

/// `Σ_r p_r ·` fraction of module-`r` samples on their module's side of
/// zero, folded to at least one half.
fn sign_fraction(marg: &[Vec<(CavityField, u32)>; 2], p: [f64; 2]) -> f64 {
    let mut f = 0.0;
    for r in 0..2 {
        let want_positive = r == 0;
        let hits = marg[r].iter().filter(|(x, _)| (x.h > 0.0) == want_positive).count();
        f += p[r] * hits as f64 / marg[r].len().max(1) as f64;
    }
    f.max(1.0 - f)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    /// Probability density per bin; integrates to the in-range fraction.
    pub density: Vec<f64>,
}

impl Histogram {
    pub fn from_samples(samples: impl IntoIterator<Item = f64>, lo: f64, hi: f64, bins: usize) -> Self {
        let mut counts = vec![0usize; bins];
        let mut total = 0usize;
        let width = (hi - lo) / bins as f64;
        for x in samples {
            total += 1;
            if x >= lo && x < hi {
                let k = (((x - lo) / width) as usize).min(bins - 1);
                counts[k] += 1;
            }
        }
        let norm = if total == 0 { 0.0 } else { 1.0 / (total as f64 * width) };
        Histogram { lo, hi, density: counts.iter().map(|&c| c as f64 * norm).collect() }
    }

    pub fn bins(&self) -> usize {
        self.density.len()
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.bins() as f64
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        let w = self.width();
        (0..self.bins()).map(move |k| self.lo + (k as f64 + 0.5) * w)
    }

    pub fn mean(&self) -> f64 {
        let w = self.width();
        self.centers().zip(&self.density).map(|(x, d)| x * d * w).sum()
    }

    /// `∫ |p − q| dx`; both histograms must share their bins.
    pub fn l1_distance(&self, other: &Histogram) -> f64 {
        assert_eq!(self.bins(), other.bins());
        assert!((self.lo - other.lo).abs() < 1e-12 && (self.hi - other.hi).abs() < 1e-12);
        let w = self.width();
        self.density.iter().zip(&other.density).map(|(a, b)| (a - b).abs() * w).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementDistribution {
    pub histograms: [Histogram; 2],
    pub fraction_correct: f64,
}

/// Per-module histograms of `x = H/A` over `[lo, hi)`; `range = None` uses
/// the sample extremes.
pub fn element_distribution(
    result: &PdResult,
    bins: usize,
    range: Option<(f64, f64)>,
) -> Result<ElementDistribution, PdError> {
    let pops = &result.marginal_population;
    if pops[0].is_empty() || pops[1].is_empty() || bins == 0 {
        return Err(PdError::EmptyPopulation);
    }
    let (lo, hi) = range.unwrap_or_else(|| {
        let xs = pops.iter().flatten().map(|f| f.x());
        let (mn, mx) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
        (mn, mx + 1e-9 * (mx - mn).abs().max(1.0))
    });
    let h = |r: usize| Histogram::from_samples(pops[r].iter().map(|f| f.x()), lo, hi, bins);
    Ok(ElementDistribution { histograms: [h(0), h(1)], fraction_correct: result.fraction_correct })
}
