//! Experiment configuration: figure presets, `key = value` files and flag
//! overrides.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use specdetect::{DegreeSpec, LaplacianKind};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    Fig2EigvecDist,
    Fig3RegularLambda2,
    Fig5RegularOverlap,
    Fig6BimodalL,
    Fig8BimodalNcut,
    Fig9PhaseDiagram,
    Fig10Sbm,
    Custom,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        ExperimentKind::Fig2EigvecDist,
        ExperimentKind::Fig3RegularLambda2,
        ExperimentKind::Fig5RegularOverlap,
        ExperimentKind::Fig6BimodalL,
        ExperimentKind::Fig8BimodalNcut,
        ExperimentKind::Fig9PhaseDiagram,
        ExperimentKind::Fig10Sbm,
        ExperimentKind::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Fig2EigvecDist => "fig2_eigvec_dist",
            ExperimentKind::Fig3RegularLambda2 => "fig3_regular_lambda2",
            ExperimentKind::Fig5RegularOverlap => "fig5_regular_overlap",
            ExperimentKind::Fig6BimodalL => "fig6_bimodal_L",
            ExperimentKind::Fig8BimodalNcut => "fig8_bimodal_ncut",
            ExperimentKind::Fig9PhaseDiagram => "fig9_phase_diagram",
            ExperimentKind::Fig10Sbm => "fig10_sbm",
            ExperimentKind::Custom => "custom",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = CliError;

    /// Full names or their `figN` prefix.
    fn from_str(s: &str) -> Result<Self, CliError> {
        let s = s.trim();
        ExperimentKind::ALL
            .into_iter()
            .find(|k| {
                let name = k.name();
                name.eq_ignore_ascii_case(s) || name.split('_').next().is_some_and(|p| p.eq_ignore_ascii_case(s))
            })
            .ok_or_else(|| CliError::Config(format!("unknown experiment '{s}'")))
    }
}

/// One degree law at one module split.
#[derive(Debug, Clone, PartialEq)]
pub struct Case {
    pub spec: DegreeSpec,
    pub p1: f64,
}

/// The swept parameter.
#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    /// Cross-edge densities `γ`.
    Gamma(Vec<f64>),
    /// Fractions of the largest admissible `γ`, `c̄ min(p1, p2)`.
    RelativeGamma(Vec<f64>),
    /// `c_in − c_out` at equal module sizes.
    Delta(Vec<f64>),
}

impl Grid {
    pub fn values(&self) -> &[f64] {
        match self {
            Grid::Gamma(v) | Grid::RelativeGamma(v) | Grid::Delta(v) => v,
        }
    }

    /// Cross-edge density of grid value `x` for `case`.
    pub fn gamma(&self, x: f64, case: &Case) -> f64 {
        let cbar = case.spec.mean_degree();
        match self {
            Grid::Gamma(_) => x,
            Grid::RelativeGamma(_) => x * cbar * case.p1.min(1.0 - case.p1),
            Grid::Delta(_) => (cbar - 0.5 * x) / 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub cases: Vec<Case>,
    pub laplacian: LaplacianKind,
    pub grid: Grid,
    /// Graph sizes; every size runs the full grid.
    pub sizes: Vec<usize>,
    pub samples: usize,
    pub base_seed: u64,
    pub output: Option<PathBuf>,
    /// Defect radii for the localized-mode estimate.
    pub radii: Vec<u32>,
    /// Population size for population dynamics; `None` skips it.
    pub pd_population: Option<usize>,
    /// Histogram bins for eigenvector-element distributions; 0 disables them.
    pub bins: usize,
    pub hist_range: (f64, f64),
    /// Mean degrees for the phase diagram.
    pub cbar_grid: Vec<f64>,
}

fn linspace(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    (0..k).map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64).collect()
}

fn bimodal_cases(p1: f64) -> Vec<Case> {
    let mut cases = Vec::new();
    for c2 in [6, 9] {
        for b1 in [0.1, 0.5, 0.9] {
            cases.push(Case { spec: DegreeSpec::Bimodal { c1: 3, c2, b1 }, p1 });
        }
    }
    cases
}

impl ExperimentConfig {
    /// Defaults reproducing the figure of the same name.
    pub fn preset(kind: ExperimentKind) -> Self {
        let regular = |c, p1| Case { spec: DegreeSpec::Regular { c }, p1 };
        let base = ExperimentConfig {
            kind,
            cases: vec![regular(3, 0.5)],
            laplacian: LaplacianKind::Unnormalized,
            grid: Grid::Gamma(vec![0.1]),
            sizes: vec![10_000],
            samples: 100,
            base_seed: 1,
            output: None,
            radii: vec![0, 1, 2, 3],
            pd_population: None,
            bins: 0,
            hist_range: (-3.0, 3.0),
            cbar_grid: Vec::new(),
        };
        match kind {
            ExperimentKind::Fig2EigvecDist => ExperimentConfig {
                cases: vec![regular(3, 0.7), regular(4, 0.6)],
                pd_population: Some(100_000),
                bins: 60,
                ..base
            },
            ExperimentKind::Fig3RegularLambda2 => ExperimentConfig {
                cases: vec![regular(3, 0.5), regular(4, 0.5)],
                grid: Grid::Gamma(linspace(0.05, 0.6, 12)),
                ..base
            },
            ExperimentKind::Fig5RegularOverlap => ExperimentConfig {
                grid: Grid::Gamma(linspace(0.025, 0.4, 16)),
                sizes: vec![1_000, 10_000],
                ..base
            },
            ExperimentKind::Fig6BimodalL => ExperimentConfig {
                cases: bimodal_cases(0.6),
                grid: Grid::RelativeGamma((1..=12).map(|k| k as f64 / 16.0).collect()),
                samples: 10,
                ..base
            },
            ExperimentKind::Fig8BimodalNcut => ExperimentConfig {
                laplacian: LaplacianKind::Normalized,
                ..ExperimentConfig::preset(ExperimentKind::Fig6BimodalL)
            },
            ExperimentKind::Fig9PhaseDiagram => ExperimentConfig {
                cases: Vec::new(),
                cbar_grid: linspace(1.5, 20.0, 38),
                samples: 1,
                ..base
            },
            ExperimentKind::Fig10Sbm => ExperimentConfig {
                cases: vec![
                    Case { spec: DegreeSpec::poisson(6.0), p1: 0.5 },
                    Case { spec: DegreeSpec::poisson(8.0), p1: 0.5 },
                ],
                laplacian: LaplacianKind::Normalized,
                grid: Grid::Delta(linspace(1.0, 11.5, 22)),
                sizes: vec![1_000, 10_000],
                samples: 10,
                ..base
            },
            ExperimentKind::Custom => ExperimentConfig { samples: 10, ..base },
        }
    }

    /// Parse a `key = value` file; `#` starts a comment. The `experiment` key
    /// selects the preset the remaining keys modify.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut pairs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", lineno + 1)))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        let kind = match pairs.iter().find(|(k, _)| k == "experiment") {
            Some((_, v)) => v.parse()?,
            None => ExperimentKind::Custom,
        };
        let mut config = Self::preset(kind);
        for (k, v) in pairs.iter().filter(|(k, _)| k != "experiment") {
            config.set(k, v)?;
        }
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Apply one setting. Spec lists are `;`-separated, numeric lists
    /// `,`-separated. A single `p1` applies to every spec; a list pairs with
    /// the specs in order.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let bad = |what: &str| CliError::Config(format!("{key}: cannot parse '{value}' as {what}"));
        match key {
            "experiment" => {
                let kind: ExperimentKind = value.parse()?;
                *self = Self::preset(kind);
            }
            "specs" | "spec" => {
                let specs = value
                    .split(';')
                    .map(|s| s.parse::<DegreeSpec>().map_err(|e| CliError::Config(e.to_string())))
                    .collect::<Result<Vec<_>, _>>()?;
                let p1 = self.cases.first().map_or(0.5, |c| c.p1);
                self.cases = specs.into_iter().map(|spec| Case { spec, p1 }).collect();
            }
            "p1" => {
                let ps = reals(value).ok_or_else(|| bad("a list of reals"))?;
                match ps.as_slice() {
                    [p] => self.cases.iter_mut().for_each(|c| c.p1 = *p),
                    _ if ps.len() == self.cases.len() => {
                        self.cases.iter_mut().zip(&ps).for_each(|(c, p)| c.p1 = *p)
                    }
                    _ => return Err(CliError::Config(format!("p1: {} values for {} specs", ps.len(), self.cases.len()))),
                }
            }
            "laplacian" => self.laplacian = value.parse().map_err(CliError::Config)?,
            "gamma" => self.grid = Grid::Gamma(reals(value).ok_or_else(|| bad("a list of reals"))?),
            "gamma_relative" => self.grid = Grid::RelativeGamma(reals(value).ok_or_else(|| bad("a list of reals"))?),
            "delta" => self.grid = Grid::Delta(reals(value).ok_or_else(|| bad("a list of reals"))?),
            "n" => self.sizes = list(value).ok_or_else(|| bad("a list of sizes"))?,
            "samples" => self.samples = value.parse().map_err(|_| bad("an integer"))?,
            "seed" => self.base_seed = value.parse().map_err(|_| bad("an integer"))?,
            "out" => self.output = Some(PathBuf::from(value)),
            "radii" => self.radii = list(value).ok_or_else(|| bad("a list of radii"))?,
            "pd" => {
                self.pd_population = match value {
                    "false" | "off" | "0" => None,
                    "true" | "on" => Some(100_000),
                    v => Some(v.parse().map_err(|_| bad("a population size or on/off"))?),
                }
            }
            "bins" => self.bins = value.parse().map_err(|_| bad("an integer"))?,
            "hist_range" => match reals(value).as_deref() {
                Some(&[lo, hi]) => self.hist_range = (lo, hi),
                _ => return Err(bad("lo,hi")),
            },
            "cbar" => self.cbar_grid = reals(value).ok_or_else(|| bad("a list of reals"))?,
            _ => return Err(CliError::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let err = |m: String| Err(CliError::Config(m));
        if self.samples < 1 {
            return err("samples must be at least 1".into());
        }
        if self.kind == ExperimentKind::Fig9PhaseDiagram {
            return check_sorted("cbar", &self.cbar_grid);
        }
        if self.cases.is_empty() {
            return err("no degree specs".into());
        }
        for c in &self.cases {
            c.spec.validate().map_err(|e| CliError::Config(e.to_string()))?;
            if !(c.p1 > 0.0 && c.p1 < 1.0) {
                return err(format!("p1 = {} outside (0, 1)", c.p1));
            }
            if matches!(self.grid, Grid::Delta(_)) && c.p1 != 0.5 {
                return err("a delta grid needs p1 = 0.5".into());
            }
        }
        check_sorted("grid", self.grid.values())?;
        if self.sizes.is_empty() || self.sizes.iter().any(|&n| n < 4) {
            return err("sizes must be nonempty and at least 4".into());
        }
        if self.radii.is_empty() {
            return err("radii must be nonempty".into());
        }
        if self.pd_population.is_some_and(|p| p < 1000) {
            return err("pd population must be at least 1000".into());
        }
        if self.bins > 0 && !(self.hist_range.0 < self.hist_range.1) {
            return err("hist_range must be increasing".into());
        }
        Ok(())
    }
}

fn check_sorted(name: &str, v: &[f64]) -> Result<(), CliError> {
    if v.is_empty() {
        return Err(CliError::Config(format!("{name} is empty")));
    }
    if v.iter().any(|x| !x.is_finite()) || v.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Config(format!("{name} must be finite and strictly increasing")));
    }
    Ok(())
}

fn list<T: FromStr>(s: &str) -> Option<Vec<T>> {
    s.split(',').map(|x| x.trim().parse().ok()).collect()
}

fn reals(s: &str) -> Option<Vec<f64>> {
    list(s)
}
