//! Sampled spectra against the analytic curves over a parameter grid.

use std::path::Path;

use rayon::prelude::*;
use specdetect::eigen::{ipr, overlap, second_smallest_eigenpair};
use specdetect::operators::{build_laplacian, zero_mode};
use specdetect::seed::mix;
use specdetect::{
    detectability_threshold, element_distribution, gaussian_fraction_correct, generate_two_block_graph,
    localization_compare, minimum_over_radii, ncut_ema, planted_labels, ratiocut_ema, regular_solution,
    run_population_dynamics, sample_degree_sequence, Background, BlockParams, DegreeSpec, FractionModel, Histogram,
    LaplacianKind, PdConfig, PdModel, ThresholdModel, Winner,
};

use crate::config::{Case, ExperimentConfig, ExperimentKind, Grid};
use crate::csv::{opt, opt_real, real, sibling, write_table};
use crate::phase::{emit_phase_diagram, write_phase_diagram, PhaseRow};
use crate::{thread_pool, CliError};

/// Analytic values shared by every sample of a grid point.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Analytics {
    pub ema_lambda2: Option<f64>,
    pub localized_lambda: Option<f64>,
    pub localized_g: Option<u32>,
    pub winner: Option<Winner>,
    pub fraction_correct: Option<f64>,
    pub pd_lambda2: Option<f64>,
    pub pd_fraction_correct: Option<f64>,
    pub gamma_c: Option<f64>,
    pub delta_c: Option<f64>,
    pub ultimate_delta: Option<f64>,
    /// Failures of individual analytic pieces, `;`-joined.
    pub notes: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub experiment: ExperimentKind,
    pub spec: DegreeSpec,
    pub laplacian: LaplacianKind,
    pub p1: f64,
    pub gamma: f64,
    pub delta: Option<f64>,
    pub n: usize,
    pub sample: usize,
    pub seed: u64,
    pub cross_edges: Option<usize>,
    /// Vertices in the largest component, on which the spectrum is measured.
    pub component: Option<usize>,
    pub lambda2: Option<f64>,
    pub ipr: Option<f64>,
    pub overlap: Option<f64>,
    pub analytics: Analytics,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub mean: f64,
    /// Sample standard deviation over `√count`; `None` for one sample.
    pub se: Option<f64>,
    pub count: usize,
}

impl Stat {
    pub fn of(values: &[f64]) -> Option<Stat> {
        let k = values.len();
        if k == 0 {
            return None;
        }
        let mean = values.iter().sum::<f64>() / k as f64;
        let se = (k > 1).then(|| {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
            (var / k as f64).sqrt()
        });
        Some(Stat { mean, se, count: k })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub spec: DegreeSpec,
    pub laplacian: LaplacianKind,
    pub p1: f64,
    pub gamma: f64,
    pub delta: Option<f64>,
    pub n: usize,
    pub samples: usize,
    pub lambda2: Option<Stat>,
    pub ipr: Option<Stat>,
    pub overlap: Option<Stat>,
    pub analytics: Analytics,
}

/// Eigenvector-element histogram, numerical (`n = Some`) or from population
/// dynamics (`n = None`).
#[derive(Debug, Clone, PartialEq)]
pub struct ElementHistogram {
    pub spec: DegreeSpec,
    pub p1: f64,
    pub gamma: f64,
    pub n: Option<usize>,
    pub module: u8,
    pub histogram: Histogram,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentOutput {
    pub records: Vec<ExperimentRecord>,
    pub summary: Vec<SummaryRow>,
    pub histograms: Vec<ElementHistogram>,
    pub phase: Vec<PhaseRow>,
}

impl ExperimentOutput {
    pub fn failed_rows(&self) -> usize {
        self.records.iter().filter(|r| r.error.is_some()).count()
    }
}

/// Spectral measurement on one sampled graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub cross_edges: usize,
    pub component: usize,
    pub lambda2: f64,
    pub ipr: f64,
    pub overlap: f64,
    /// Per-module elements `√n v_i`, oriented so module 1 has positive mean.
    pub elements: Option<[Vec<f64>; 2]>,
}

/// Cross-edge count nearest to `γn` that a regular law can realize.
pub fn feasible_cross_edges(spec: &DegreeSpec, params: &BlockParams) -> usize {
    let target = params.gamma * params.n as f64;
    // Laws whose degrees share one parity fix the parity of every module's
    // stub count, and so of the cross count.
    let fixed = match *spec {
        DegreeSpec::Regular { c } => Some(c),
        DegreeSpec::Bimodal { c1, c2, .. } if c1 % 2 == c2 % 2 => Some(c1),
        _ => None,
    };
    match fixed {
        Some(c) => {
            let parity = (c as usize * params.module_sizes()[0]) % 2;
            let lower = target.floor() as usize;
            let candidates = [lower.saturating_sub(1), lower, lower + 1, lower + 2];
            candidates
                .into_iter()
                .filter(|x| x % 2 == parity)
                .min_by(|a, b| (*a as f64 - target).abs().total_cmp(&(*b as f64 - target).abs()))
                .unwrap_or(lower)
        }
        None => target.round() as usize,
    }
}

pub fn measure(
    spec: &DegreeSpec,
    p1: f64,
    gamma: f64,
    n: usize,
    kind: LaplacianKind,
    seed: u64,
    keep_elements: bool,
) -> Result<Measurement, String> {
    let nominal = BlockParams::new(n, p1, gamma);
    let cross_edges = feasible_cross_edges(spec, &nominal);
    let realized = cross_edges as f64 / n as f64;
    let params = BlockParams::new(n, p1, realized);
    let degrees = sample_degree_sequence(spec, &params, seed).map_err(|e| e.to_string())?;
    let graph =
        generate_two_block_graph(&degrees, &planted_labels(&params), realized, seed).map_err(|e| e.to_string())?;
    let (graph, _) = graph.largest_component();
    if graph.n() < 3 {
        return Err(format!("largest component has {} vertices", graph.n()));
    }
    let m = build_laplacian(&graph, kind).map_err(|e| e.to_string())?;
    let eig = second_smallest_eigenpair(&m, &zero_mode(&graph, kind), seed).map_err(|e| e.to_string())?;
    let v = &eig.vector;
    let elements = keep_elements.then(|| {
        let scale = (graph.n() as f64).sqrt();
        let mut out = [Vec::new(), Vec::new()];
        for (&x, &l) in v.iter().zip(&graph.labels) {
            out[(l - 1) as usize].push(scale * x);
        }
        let mean0 = out[0].iter().sum::<f64>();
        if mean0 < 0.0 {
            out.iter_mut().flatten().for_each(|x| *x = -*x);
        }
        out
    });
    Ok(Measurement {
        cross_edges,
        component: graph.n(),
        lambda2: eig.lambda2,
        ipr: ipr(v).map_err(|e| e.to_string())?,
        overlap: overlap(v, &graph.labels).map_err(|e| e.to_string())?,
        elements,
    })
}

fn pd_model(kind: LaplacianKind, spec: &DegreeSpec) -> PdModel {
    match (kind, spec) {
        (LaplacianKind::Normalized, _) => PdModel::GeneralNcut,
        (LaplacianKind::Unnormalized, DegreeSpec::Regular { .. }) => PdModel::RegularL,
        (LaplacianKind::Unnormalized, _) => PdModel::GeneralL,
    }
}

/// Analytic columns for one grid point, plus population-dynamics histograms
/// when requested.
pub fn analytics(
    config: &ExperimentConfig,
    case_index: usize,
    point_index: usize,
    gamma: f64,
) -> (Analytics, Vec<ElementHistogram>) {
    let case = &config.cases[case_index];
    let (spec, p1, kind) = (&case.spec, case.p1, config.laplacian);
    let mut out = Analytics::default();
    let mut notes = Vec::new();
    let cbar = spec.mean_degree();

    let ema = match (kind, spec) {
        (LaplacianKind::Unnormalized, DegreeSpec::Regular { c }) => regular_solution(*c, p1, gamma),
        (LaplacianKind::Unnormalized, _) => ratiocut_ema(spec, p1, gamma).map(|(s, _)| s),
        (LaplacianKind::Normalized, _) => ncut_ema(spec, p1, gamma),
    };
    match ema {
        Ok(s) => out.ema_lambda2 = Some(s.lambda2),
        Err(e) => notes.push(format!("ema: {e}")),
    }

    if let Some((c_d, _)) = spec.defect_and_background() {
        let bg = Background::Ema { spec: spec.clone(), p1, gamma };
        match minimum_over_radii(kind, c_d, &bg, &config.radii) {
            Ok(m) => {
                out.localized_lambda = m.as_ref().map(|m| m.lambda);
                out.localized_g = m.as_ref().map(|m| m.g);
                out.winner = out.ema_lambda2.map(|l| localization_compare(l, m.as_ref()).winner);
            }
            Err(e) => notes.push(format!("localized: {e}")),
        }
    }

    if p1 == 0.5 {
        let model = match (kind, spec) {
            (LaplacianKind::Unnormalized, DegreeSpec::Regular { c }) => Some(FractionModel::RegularL { c: *c }),
            (LaplacianKind::Normalized, _) => Some(FractionModel::NcutGeneral { spec: spec.clone() }),
            _ => None,
        };
        if let Some(model) = model {
            match gaussian_fraction_correct(&model, p1, gamma) {
                Ok(f) => out.fraction_correct = Some(f),
                Err(e) => notes.push(format!("fraction: {e}")),
            }
        }
    }

    let threshold_model = match (kind, spec) {
        (LaplacianKind::Unnormalized, DegreeSpec::Regular { c }) => Some(ThresholdModel::RegularL { c: *c }),
        (LaplacianKind::Normalized, DegreeSpec::Poisson { .. }) => Some(ThresholdModel::SbmNcut { cbar }),
        (LaplacianKind::Normalized, _) => Some(ThresholdModel::NcutGeneral { cbar }),
        _ => None,
    };
    if let Some(t) = threshold_model.and_then(|m| detectability_threshold(m, p1).ok()) {
        out.gamma_c = Some(t.gamma_c);
        out.delta_c = t.delta_c;
        out.ultimate_delta = Some(t.ultimate_delta);
    }

    let mut histograms = Vec::new();
    if let Some(population) = config.pd_population {
        let seed = mix(config.base_seed, &[u64::MAX, case_index as u64, point_index as u64]);
        let pd = PdConfig { population_size: population, ..PdConfig::new(pd_model(kind, spec), spec.clone(), p1, gamma, seed) };
        match run_population_dynamics(&pd) {
            Ok(r) => {
                out.pd_lambda2 = Some(r.lambda2);
                out.pd_fraction_correct = Some(r.fraction_correct);
                if config.bins > 0 {
                    let (lo, hi) = config.hist_range;
                    if let Ok(d) = element_distribution(&r, config.bins, Some((lo, hi))) {
                        for (m, h) in d.histograms.into_iter().enumerate() {
                            histograms.push(ElementHistogram {
                                spec: spec.clone(),
                                p1,
                                gamma,
                                n: None,
                                module: m as u8 + 1,
                                histogram: h,
                            });
                        }
                    }
                }
            }
            Err(e) => notes.push(format!("pd: {e}")),
        }
    }
    out.notes = (!notes.is_empty()).then(|| notes.join("; "));
    (out, histograms)
}

struct Point {
    case: usize,
    index: usize,
    gamma: f64,
    delta: Option<f64>,
}

fn grid_points(config: &ExperimentConfig) -> Vec<Point> {
    let mut points = Vec::new();
    for (ci, case) in config.cases.iter().enumerate() {
        let cbar = case.spec.mean_degree();
        for (pi, &x) in config.grid.values().iter().enumerate() {
            let gamma = config.grid.gamma(x, case);
            let delta = match config.grid {
                Grid::Delta(_) => Some(x),
                _ => (case.p1 == 0.5).then(|| 2.0 * cbar - 8.0 * gamma),
            };
            // Skip values outside the admissible region.
            if gamma < 0.0 || gamma > cbar * case.p1.min(1.0 - case.p1) + 1e-12 {
                continue;
            }
            points.push(Point { case: ci, index: pi, gamma, delta });
        }
    }
    points
}

/// Run the sweep described by `config`, writing CSV files when it names an
/// output path: records at the path itself, the per-point summary beside it
/// as `.summary.csv` and element histograms as `.hist.csv`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput, CliError> {
    config.validate()?;
    let pool = thread_pool()?;
    if config.kind == ExperimentKind::Fig9PhaseDiagram {
        let phase = emit_phase_diagram(&config.cbar_grid)?;
        if let Some(path) = &config.output {
            write_phase_diagram(path, &phase)?;
        }
        return Ok(ExperimentOutput { phase, ..Default::default() });
    }
    let points = grid_points(config);
    let keep_elements = config.bins > 0;

    let (analytic, pd_hists): (Vec<Analytics>, Vec<Vec<ElementHistogram>>) = pool.install(|| {
        points.par_iter().map(|p| analytics(config, p.case, p.index, p.gamma)).unzip()
    });

    let mut work = Vec::new();
    for k in 0..points.len() {
        for (ni, &n) in config.sizes.iter().enumerate() {
            for s in 0..config.samples {
                work.push((k, ni, n, s));
            }
        }
    }
    let measured: Vec<(u64, Result<Measurement, String>)> = pool.install(|| {
        work.par_iter()
            .map(|&(k, ni, n, s)| {
                let p = &points[k];
                let case = &config.cases[p.case];
                let seed = mix(config.base_seed, &[p.case as u64, p.index as u64, ni as u64, s as u64]);
                (seed, measure(&case.spec, case.p1, p.gamma, n, config.laplacian, seed, keep_elements))
            })
            .collect()
    });

    let mut out = ExperimentOutput::default();
    let mut elements: Vec<Option<[Vec<f64>; 2]>> = Vec::new();
    for (&(k, _, n, s), (seed, m)) in work.iter().zip(measured) {
        let p = &points[k];
        let case: &Case = &config.cases[p.case];
        let mut rec = ExperimentRecord {
            experiment: config.kind,
            spec: case.spec.clone(),
            laplacian: config.laplacian,
            p1: case.p1,
            gamma: p.gamma,
            delta: p.delta,
            n,
            sample: s,
            seed,
            cross_edges: None,
            component: None,
            lambda2: None,
            ipr: None,
            overlap: None,
            analytics: analytic[k].clone(),
            error: None,
        };
        match m {
            Ok(m) => {
                rec.cross_edges = Some(m.cross_edges);
                rec.component = Some(m.component);
                rec.lambda2 = Some(m.lambda2);
                rec.ipr = Some(m.ipr);
                rec.overlap = Some(m.overlap);
                elements.push(m.elements);
            }
            Err(e) => {
                rec.error = Some(e);
                elements.push(None);
            }
        }
        out.records.push(rec);
    }

    // Records are ordered by (point, size, sample), so each group is contiguous.
    let group = config.samples;
    for (chunk, elems) in out.records.chunks(group).zip(elements.chunks(group)) {
        let first = &chunk[0];
        let ok: Vec<&ExperimentRecord> = chunk.iter().filter(|r| r.error.is_none()).collect();
        let col = |f: fn(&ExperimentRecord) -> Option<f64>| Stat::of(&ok.iter().filter_map(|r| f(r)).collect::<Vec<_>>());
        out.summary.push(SummaryRow {
            spec: first.spec.clone(),
            laplacian: first.laplacian,
            p1: first.p1,
            gamma: first.gamma,
            delta: first.delta,
            n: first.n,
            samples: ok.len(),
            lambda2: col(|r| r.lambda2),
            ipr: col(|r| r.ipr),
            overlap: col(|r| r.overlap),
            analytics: first.analytics.clone(),
        });
        if keep_elements {
            let (lo, hi) = config.hist_range;
            for module in 0..2 {
                let xs = elems.iter().flatten().flat_map(|e| e[module].iter().copied());
                out.histograms.push(ElementHistogram {
                    spec: first.spec.clone(),
                    p1: first.p1,
                    gamma: first.gamma,
                    n: Some(first.n),
                    module: module as u8 + 1,
                    histogram: Histogram::from_samples(xs, lo, hi, config.bins),
                });
            }
        }
    }
    out.histograms.extend(pd_hists.into_iter().flatten());

    if let Some(path) = &config.output {
        write_output(path, &out)?;
    }
    Ok(out)
}

pub const RECORD_HEADER: [&str; 24] = [
    "experiment",
    "spec",
    "laplacian",
    "p1",
    "gamma",
    "delta",
    "n",
    "sample",
    "seed",
    "cross_edges",
    "component",
    "lambda2",
    "ipr",
    "overlap",
    "ema_lambda2",
    "localized_lambda",
    "localized_g",
    "winner",
    "fraction_correct_ema",
    "pd_lambda2",
    "pd_fraction_correct",
    "notes",
    "status",
    "error",
];

pub const SUMMARY_HEADER: [&str; 24] = [
    "spec",
    "laplacian",
    "p1",
    "gamma",
    "delta",
    "n",
    "samples",
    "lambda2_mean",
    "lambda2_se",
    "ipr_mean",
    "ipr_se",
    "overlap_mean",
    "overlap_se",
    "ema_lambda2",
    "localized_lambda",
    "localized_g",
    "winner",
    "fraction_correct_ema",
    "pd_lambda2",
    "pd_fraction_correct",
    "gamma_c",
    "delta_c",
    "ultimate_delta",
    "notes",
];

pub const HISTOGRAM_HEADER: [&str; 8] = ["source", "spec", "p1", "gamma", "n", "module", "bin_center", "density"];

fn analytic_fields(a: &Analytics) -> Vec<String> {
    vec![
        opt_real(a.ema_lambda2),
        opt_real(a.localized_lambda),
        opt(a.localized_g),
        opt(a.winner),
        opt_real(a.fraction_correct),
        opt_real(a.pd_lambda2),
        opt_real(a.pd_fraction_correct),
    ]
}

pub fn record_fields(r: &ExperimentRecord) -> Vec<String> {
    let mut f = vec![
        r.experiment.to_string(),
        r.spec.to_string(),
        r.laplacian.to_string(),
        real(r.p1),
        real(r.gamma),
        opt_real(r.delta),
        r.n.to_string(),
        r.sample.to_string(),
        r.seed.to_string(),
        opt(r.cross_edges),
        opt(r.component),
        opt_real(r.lambda2),
        opt_real(r.ipr),
        opt_real(r.overlap),
    ];
    f.extend(analytic_fields(&r.analytics));
    f.push(r.analytics.notes.clone().unwrap_or_else(|| "NA".into()));
    f.push(if r.error.is_some() { "error" } else { "ok" }.into());
    f.push(r.error.clone().unwrap_or_else(|| "NA".into()));
    f
}

pub fn summary_fields(s: &SummaryRow) -> Vec<String> {
    let mean = |x: &Option<Stat>| opt_real(x.map(|s| s.mean));
    let se = |x: &Option<Stat>| opt_real(x.and_then(|s| s.se));
    let mut f = vec![
        s.spec.to_string(),
        s.laplacian.to_string(),
        real(s.p1),
        real(s.gamma),
        opt_real(s.delta),
        s.n.to_string(),
        s.samples.to_string(),
        mean(&s.lambda2),
        se(&s.lambda2),
        mean(&s.ipr),
        se(&s.ipr),
        mean(&s.overlap),
        se(&s.overlap),
    ];
    f.extend(analytic_fields(&s.analytics));
    f.extend([opt_real(s.analytics.gamma_c), opt_real(s.analytics.delta_c), opt_real(s.analytics.ultimate_delta)]);
    f.push(s.analytics.notes.clone().unwrap_or_else(|| "NA".into()));
    f
}

pub fn histogram_rows(h: &ElementHistogram) -> Vec<Vec<String>> {
    let source = if h.n.is_some() { "numerical" } else { "pd" };
    h.histogram
        .centers()
        .zip(&h.histogram.density)
        .map(|(c, d)| {
            vec![
                source.to_string(),
                h.spec.to_string(),
                real(h.p1),
                real(h.gamma),
                opt(h.n),
                h.module.to_string(),
                real(c),
                real(*d),
            ]
        })
        .collect()
}

pub fn write_output(path: &Path, out: &ExperimentOutput) -> Result<(), CliError> {
    let records: Vec<_> = out.records.iter().map(record_fields).collect();
    write_table(path, &RECORD_HEADER, &records)?;
    let summary: Vec<_> = out.summary.iter().map(summary_fields).collect();
    write_table(&sibling(path, "summary"), &SUMMARY_HEADER, &summary)?;
    if !out.histograms.is_empty() {
        let rows: Vec<_> = out.histograms.iter().flat_map(histogram_rows).collect();
        write_table(&sibling(path, "hist"), &HISTOGRAM_HEADER, &rows)?;
    }
    Ok(())
}
