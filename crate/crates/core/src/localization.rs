//! Eigenvectors localized on a tree of low-degree defects.
//!
//! Shell amplitudes `V_d` of a tree whose vertices within distance `g` of the
//! root have degree `c_D` obey a three-term recurrence. A localized mode
//! continues into the background as `V_{d+1} = κ V_d` with `|κ| < 1`; its
//! eigenvalue is the `λ` at which the defect recurrence meets that decay.

use std::fmt;

use thiserror::Error;

use crate::ema::bisect;
use crate::graphs::{DegreeDistribution, DegreeSpec};
use crate::operators::LaplacianKind;

#[derive(Debug, Error, PartialEq)]
pub enum LocalizationError {
    #[error("invalid defect tree: {0}")]
    InvalidTree(String),
    #[error("effective-medium closure has no root anywhere below {0}")]
    EmaClosureFailed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Background {
    Uniform { c_b: u32 },
    Ema { spec: DegreeSpec, p1: f64, gamma: f64 },
}

impl fmt::Display for Background {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Background::Uniform { c_b } => write!(f, "uniform:{c_b}"),
            Background::Ema { spec, p1, gamma } => write!(f, "ema:{spec}:p1={p1}:gamma={gamma}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefectTree {
    pub c_d: u32,
    pub g: u32,
    pub background: Background,
}

impl DefectTree {
    pub fn validate(&self) -> Result<(), LocalizationError> {
        if self.c_d < 1 {
            return Err(LocalizationError::InvalidTree("c_D must be >= 1".into()));
        }
        match &self.background {
            Background::Uniform { c_b } => {
                if *c_b == self.c_d {
                    return Err(LocalizationError::InvalidTree("c_D equals c_B".into()));
                }
                if *c_b < 2 {
                    return Err(LocalizationError::InvalidTree("c_B must be >= 2".into()));
                }
            }
            Background::Ema { spec, .. } => {
                spec.validate().map_err(|e| LocalizationError::InvalidTree(e.to_string()))?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalizedMode {
    pub lambda: f64,
    pub kappa: f64,
    /// `V_0, V_1, …` with `V_0 = 1`.
    pub profile: Vec<f64>,
    pub finite_norm: bool,
    /// Largest relative violation of the shell equations by `profile`.
    pub recurrence_residual: f64,
    pub g: u32,
}

/// Root of the bulk characteristic equation with `|κ| < 1`, the smaller one
/// in magnitude. `None` inside the band or on its edge.
pub fn bulk_damping_factor(kind: LaplacianKind, c_b: f64, lambda: f64) -> Option<f64> {
    let (qa, qb) = match kind {
        LaplacianKind::Unnormalized => (c_b - 1.0, c_b - lambda),
        LaplacianKind::Normalized => (c_b - 1.0, c_b * (1.0 - lambda)),
    };
    let disc = qb * qb - 4.0 * qa;
    if disc <= 1e-12 * qb.abs().max(1.0) {
        return None;
    }
    let q = 0.5 * (qb + qb.signum() * disc.sqrt());
    let small = 1.0 / q;
    (small.abs() < 1.0).then_some(small)
}

/// Lower edge of the bulk band of a `c_b`-regular tree.
pub fn band_edge(kind: LaplacianKind, c_b: f64) -> f64 {
    match kind {
        LaplacianKind::Unnormalized => c_b - 2.0 * (c_b - 1.0).sqrt(),
        LaplacianKind::Normalized => 1.0 - 2.0 * (c_b - 1.0).sqrt() / c_b,
    }
}

/// Shell degrees seen by the recurrence: `c_D` up to shell `g`, `c_B` after.
struct Shells {
    kind: LaplacianKind,
    c_d: f64,
    c_b: f64,
    g: usize,
}

impl Shells {
    fn degree(&self, d: usize) -> f64 {
        if d <= self.g {
            self.c_d
        } else {
            self.c_b
        }
    }

    fn children(&self, d: usize) -> f64 {
        if d == 0 {
            self.c_d
        } else {
            self.degree(d) - 1.0
        }
    }

    /// Shell whose amplitude is first fixed by the bulk decay.
    fn matching_shell(&self) -> usize {
        match self.kind {
            LaplacianKind::Unnormalized => self.g + 1,
            LaplacianKind::Normalized => self.g + 2,
        }
    }

    /// Coefficients `(down, diag, up)` of shell `d`:
    /// `diag·V_d = up·V_{d+1} + down·V_{d−1}`.
    fn coefficients(&self, d: usize, lambda: f64) -> (f64, f64, f64) {
        let cd = self.degree(d);
        let ch = self.children(d);
        match self.kind {
            LaplacianKind::Unnormalized => (1.0, cd - lambda, ch),
            LaplacianKind::Normalized => {
                let down = if d == 0 { 0.0 } else { 1.0 / (cd * self.degree(d - 1)).sqrt() };
                (down, 1.0 - lambda, ch / (cd * self.degree(d + 1)).sqrt())
            }
        }
    }

    /// Forward recurrence from `V_0 = 1` up to shell `last`.
    fn forward(&self, lambda: f64, last: usize) -> Vec<f64> {
        let mut v = vec![1.0];
        for d in 0..last {
            let (down, diag, up) = self.coefficients(d, lambda);
            let prev = if d == 0 { 0.0 } else { v[d - 1] };
            v.push((diag * v[d] - down * prev) / up);
        }
        v
    }

    fn mismatch(&self, lambda: f64, kappa: f64) -> f64 {
        let s = self.matching_shell();
        let v = self.forward(lambda, s);
        v[s] - kappa * v[s - 1]
    }

    /// Profile continued by the decay factor, with the residual of every
    /// shell equation up to the matching shell.
    fn profile(&self, lambda: f64, kappa: f64, bulk_exact: bool) -> (Vec<f64>, f64) {
        let s = self.matching_shell();
        let mut v = self.forward(lambda, s);
        let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut residual: f64 = 0.0;
        let extra = 40;
        for _ in 0..extra {
            let last = *v.last().unwrap();
            v.push(kappa * last);
        }
        let upto = if bulk_exact { v.len() - 1 } else { s };
        for d in 0..upto {
            let (down, diag, up) = self.coefficients(d, lambda);
            let prev = if d == 0 { 0.0 } else { v[d - 1] };
            let r = diag * v[d] - up * v[d + 1] - down * prev;
            let size = (diag.abs() + up.abs() + down.abs()) * scale.max(1e-300);
            residual = residual.max(r.abs() / size);
        }
        (v, residual)
    }
}

/// Smallest root of `f` on `(lo, hi)` from a uniform grid plus bisection.
/// Points where `f` is undefined (`None`) break the bracket chain.
fn grid_roots(lo: f64, hi: f64, f: impl Fn(f64) -> Option<f64>) -> Vec<f64> {
    const POINTS: usize = 1000;
    let mut roots = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for k in 0..=POINTS {
        let x = lo + (hi - lo) * (k as f64 + 0.5) / (POINTS as f64 + 1.0);
        let fx = f(x);
        if let (Some((px, pf)), Some(v)) = (prev, fx) {
            if (pf < 0.0) != (v < 0.0) {
                roots.push(bisect(px, x, |t| f(t).unwrap_or(f64::NAN)));
            }
        }
        prev = fx.map(|v| (x, v));
    }
    roots
}

fn uniform_shells(kind: LaplacianKind, tree: &DefectTree, c_b: f64) -> Shells {
    Shells { kind, c_d: tree.c_d as f64, c_b, g: tree.g as usize }
}

/// Localized mode on a tree with a uniform background, or `None`.
pub fn localized_mode_uniform(kind: LaplacianKind, tree: &DefectTree) -> Option<LocalizedMode> {
    tree.validate().ok()?;
    let Background::Uniform { c_b } = tree.background else { return None };
    let c_b = c_b as f64;
    if kind == LaplacianKind::Unnormalized && tree.g == 0 {
        return unnormalized_root_defect(tree.c_d as f64, c_b);
    }
    uniform_root_scan(kind, tree, c_b)
}

/// Single defect at the root of an unnormalized tree.
fn unnormalized_root_defect(c_d: f64, c_b: f64) -> Option<LocalizedMode> {
    let den = c_b - c_d - 1.0;
    if den == 0.0 {
        return None;
    }
    let kappa = 1.0 / den;
    let lambda = c_d * (c_b - c_d - 2.0) / den;
    let finite = c_d < c_b - 1.0 - (c_b - 1.0).sqrt();
    if !finite || lambda <= 0.0 || kappa.abs() >= 1.0 {
        return None;
    }
    let shells = Shells { kind: LaplacianKind::Unnormalized, c_d, c_b, g: 0 };
    let (profile, recurrence_residual) = shells.profile(lambda, kappa, true);
    Some(LocalizedMode { lambda, kappa, profile, finite_norm: true, recurrence_residual, g: 0 })
}

fn uniform_root_scan(kind: LaplacianKind, tree: &DefectTree, c_b: f64) -> Option<LocalizedMode> {
    let shells = uniform_shells(kind, tree, c_b);
    let edge = band_edge(kind, c_b);
    if edge <= 0.0 {
        return None;
    }
    let f = |l: f64| bulk_damping_factor(kind, c_b, l).map(|k| shells.mismatch(l, k));
    for lambda in grid_roots(0.0, edge, f) {
        let Some(kappa) = bulk_damping_factor(kind, c_b, lambda) else { continue };
        if (c_b - 1.0) * kappa * kappa < 1.0 {
            let (profile, recurrence_residual) = shells.profile(lambda, kappa, true);
            return Some(LocalizedMode {
                lambda,
                kappa,
                profile,
                finite_norm: true,
                recurrence_residual,
                g: tree.g,
            });
        }
    }
    None
}

/// Smallest root `k` of `Σ_t b_t c_t / (c_t(1−k) − λ) = c̄ k/(1−k²)` on
/// `(0, 1 − λ/c_min)`, the decay factor `1 + â` of the unnormalized closure
/// at `φ = −λ`.
fn ema_decay(dist: &DegreeDistribution, lambda: f64) -> Option<f64> {
    let cbar = dist.mean();
    let cmin = dist.min_degree() as f64;
    let kmax = 1.0 - lambda / cmin;
    if kmax <= 0.0 {
        return None;
    }
    let h = |k: f64| {
        dist.iter().map(|(c, b)| b * c as f64 / (c as f64 * (1.0 - k) - lambda)).sum::<f64>()
            - cbar * k / (1.0 - k * k)
    };
    const POINTS: usize = 400;
    let mut prev = (0.0, h(0.0));
    for i in 1..POINTS {
        let k = kmax * i as f64 / POINTS as f64;
        let v = h(k);
        if (prev.1 < 0.0) != (v < 0.0) {
            return Some(bisect(prev.0, k, h));
        }
        prev = (k, v);
    }
    None
}

/// Localized mode against an effective-medium background.
///
/// For `L` the decay factor is `1 + â*(λ)` from the variance closure at
/// `φ = −λ`; for `𝓛` the background enters through `c̄` only, both in the
/// decay factor and in the shell just outside the defects. Returns the lowest
/// consistent `λ` with a finite norm when one exists, otherwise the lowest
/// consistent `λ` flagged as not normalizable, otherwise `None`.
pub fn localized_mode_ema(
    kind: LaplacianKind,
    tree: &DefectTree,
) -> Result<Option<LocalizedMode>, LocalizationError> {
    tree.validate()?;
    let Background::Ema { spec, .. } = &tree.background else {
        return Err(LocalizationError::InvalidTree("expected an effective-medium background".into()));
    };
    let dist = spec.distribution();
    let cbar = dist.mean();
    let branching = dist.moment(2) / cbar - 1.0;
    let shells = uniform_shells(kind, tree, cbar);

    let decay = |l: f64| -> Option<f64> {
        match kind {
            LaplacianKind::Unnormalized => ema_decay(&dist, l),
            LaplacianKind::Normalized => bulk_damping_factor(kind, cbar, l),
        }
    };
    let upper = match kind {
        LaplacianKind::Unnormalized => {
            let cmin = dist.min_degree() as f64;
            if decay(1e-12).is_none() {
                return Err(LocalizationError::EmaClosureFailed(cmin));
            }
            // The closure stays solvable on an interval starting at zero.
            bisect(1e-12, cmin, |l| if decay(l).is_some() { -1.0 } else { 1.0 })
        }
        LaplacianKind::Normalized => band_edge(kind, cbar),
    };
    if upper <= 0.0 {
        return Err(LocalizationError::EmaClosureFailed(upper));
    }
    let roots = grid_roots(0.0, upper, |l| decay(l).map(|k| shells.mismatch(l, k)));
    let mut fallback = None;
    for lambda in roots {
        let Some(kappa) = decay(lambda) else { continue };
        let finite_norm = branching * kappa * kappa < 1.0;
        let exact = kind == LaplacianKind::Normalized;
        let (profile, recurrence_residual) = shells.profile(lambda, kappa, exact);
        let mode = LocalizedMode { lambda, kappa, profile, finite_norm, recurrence_residual, g: tree.g };
        if finite_norm {
            return Ok(Some(mode));
        }
        fallback.get_or_insert(mode);
    }
    Ok(fallback)
}

/// Lowest finite-norm localized eigenvalue over the given defect radii.
pub fn minimum_over_radii(
    kind: LaplacianKind,
    c_d: u32,
    background: &Background,
    radii: &[u32],
) -> Result<Option<LocalizedMode>, LocalizationError> {
    let mut best: Option<LocalizedMode> = None;
    for &g in radii {
        let tree = DefectTree { c_d, g, background: background.clone() };
        let mode = match background {
            Background::Uniform { .. } => {
                tree.validate()?;
                localized_mode_uniform(kind, &tree)
            }
            Background::Ema { .. } => localized_mode_ema(kind, &tree)?,
        };
        if let Some(m) = mode.filter(|m| m.finite_norm) {
            if best.as_ref().is_none_or(|b| m.lambda < b.lambda) {
                best = Some(m);
            }
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Winner {
    Community,
    Localized,
}

impl fmt::Display for Winner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Winner::Community => "community",
            Winner::Localized => "localized",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub winner: Winner,
    /// `community − localized`; NaN without a localized mode.
    pub gap: f64,
}

pub fn localization_compare(community_lambda2: f64, localized: Option<&LocalizedMode>) -> Comparison {
    match localized {
        None => Comparison { winner: Winner::Community, gap: f64::NAN },
        Some(m) => {
            let gap = community_lambda2 - m.lambda;
            let winner = if m.finite_norm && m.lambda < community_lambda2 {
                Winner::Localized
            } else {
                Winner::Community
            };
            Comparison { winner, gap }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(c_d: u32, g: u32, c_b: u32) -> DefectTree {
        DefectTree { c_d, g, background: Background::Uniform { c_b } }
    }

    #[test]
    fn damping_examples() {
        let k = bulk_damping_factor(LaplacianKind::Unnormalized, 9.0, 2.4).unwrap();
        assert!((k - 0.2).abs() < 1e-14);
        let edge = band_edge(LaplacianKind::Unnormalized, 9.0);
        assert_eq!(bulk_damping_factor(LaplacianKind::Unnormalized, 9.0, edge), None);
        let k = bulk_damping_factor(LaplacianKind::Normalized, 7.0, 0.0).unwrap();
        assert!((k - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn root_defect_closed_form() {
        let m = localized_mode_uniform(LaplacianKind::Unnormalized, &uniform(3, 0, 9)).unwrap();
        assert!((m.lambda - 2.4).abs() < 1e-12);
        assert!((m.kappa - 0.2).abs() < 1e-12);
        assert!(m.finite_norm);
        assert!(localized_mode_uniform(LaplacianKind::Unnormalized, &uniform(3, 0, 6)).is_none());
        let scanned = uniform_root_scan(LaplacianKind::Unnormalized, &uniform(3, 0, 9), 9.0).unwrap();
        assert!((scanned.lambda - 2.4).abs() < 1e-10);
    }

    #[test]
    fn normalized_root_defect_never_localizes() {
        for c_d in 1..8 {
            for c_b in 3..15 {
                if c_d != c_b {
                    assert!(localized_mode_uniform(LaplacianKind::Normalized, &uniform(c_d, 0, c_b)).is_none());
                }
            }
        }
    }

    #[test]
    fn compare_rules() {
        assert_eq!(localization_compare(0.2, None).winner, Winner::Community);
        let m = LocalizedMode {
            lambda: 0.10,
            kappa: 0.3,
            profile: vec![],
            finite_norm: true,
            recurrence_residual: 0.0,
            g: 0,
        };
        let c = localization_compare(0.15, Some(&m));
        assert_eq!(c.winner, Winner::Localized);
        assert!((c.gap - 0.05).abs() < 1e-15);
    }
}
