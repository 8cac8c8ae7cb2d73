use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use specdetect::graphs::{read_edge_list, read_labels, write_edge_list, write_labels};
use specdetect::{
    element_distribution, evaluate_lambda2, gaussian_fraction_correct, generate_two_block_graph, localization_compare,
    localized_mode_ema, localized_mode_uniform, ncut_ema, planted_labels, ratiocut_ema, regular_solution,
    run_population_dynamics, sample_degree_sequence, sbm_lambda2_curve, Background, BlockParams, DefectTree,
    DegreeSpec, FractionModel, HInit, LaplacianKind, PdConfig, PdModel, PlantedGraph,
};
use specdetect_cli::csv::{opt, opt_real, real, row, sibling, write_atomic, write_table};
use specdetect_cli::phase::{phase_fields, write_phase_diagram, PHASE_HEADER};
use specdetect_cli::{emit_phase_diagram, run_experiment, CliError, ExperimentConfig, ExperimentKind};

#[derive(Parser)]
#[command(name = "specdetect", version, about = "Spectral community detectability on sparse two-block random graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a two-block graph and write its edge list and labels.
    Generate(GenerateArgs),
    /// Second-smallest Laplacian eigenpair of a sampled or stored graph.
    Spectrum(SpectrumArgs),
    /// Solve the cavity equations by population dynamics.
    Pd(PdArgs),
    /// Effective-medium curves over a grid.
    Ema(EmaArgs),
    /// Localized-mode estimates around a degree defect.
    Localize(LocalizeArgs),
    /// Run a figure preset or a config file.
    Experiment(ExperimentArgs),
    /// Spectral and ultimate thresholds against the mean degree.
    PhaseDiagram(PhaseArgs),
}

#[derive(Args)]
struct GraphArgs {
    /// Degree law: regular:C, bimodal:C1,C2,B1 or poisson:CBAR[,MIN[,CMAX]].
    #[arg(long)]
    spec: DegreeSpec,
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    p1: f64,
    #[arg(long)]
    gamma: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Edge-list path; labels go beside it as `.labels.csv`. Stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long, conflicts_with_all = ["spec", "gamma"], requires = "labels")]
    graph: Option<PathBuf>,
    /// Module labels (1 or 2 per line) for a stored graph.
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long)]
    spec: Option<DegreeSpec>,
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    p1: f64,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "L")]
    laplacian: LaplacianKind,
    /// Also write the eigenvector, one element per line.
    #[arg(long)]
    vector_out: Option<PathBuf>,
}

#[derive(Args)]
struct PdArgs {
    /// regular-l, general-l or general-ncut.
    #[arg(long, default_value = "general-l")]
    model: PdModel,
    #[arg(long)]
    spec: DegreeSpec,
    #[arg(long, default_value_t = 0.5)]
    p1: f64,
    #[arg(long)]
    gamma: f64,
    #[arg(long, default_value_t = 100_000)]
    population: usize,
    #[arg(long, default_value_t = 200)]
    equilibration: usize,
    #[arg(long, default_value_t = 200)]
    measurement: usize,
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
    /// Start from Gaussian fields instead of module signs.
    #[arg(long)]
    symmetric: bool,
    /// Also evaluate the free-energy functional with this many random pairs.
    #[arg(long)]
    functional_pairs: Option<usize>,
    #[arg(long, default_value_t = 60)]
    bins: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EmaArgs {
    /// regular, ratiocut, ncut or sbm.
    #[arg(long)]
    model: String,
    /// Degree law; for sbm only its mean degree is used.
    #[arg(long)]
    spec: DegreeSpec,
    #[arg(long, default_value_t = 0.5)]
    p1: f64,
    /// Comma-separated cross-edge densities.
    #[arg(long, value_delimiter = ',', conflicts_with = "delta")]
    gamma: Vec<f64>,
    /// Comma-separated `c_in − c_out` values at equal module sizes.
    #[arg(long, value_delimiter = ',')]
    delta: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LocalizeArgs {
    #[arg(long, default_value = "L")]
    laplacian: LaplacianKind,
    /// Defect degree; defaults to the defect class of a bimodal spec.
    #[arg(long)]
    c_d: Option<u32>,
    /// Regular background degree.
    #[arg(long, conflicts_with = "spec")]
    c_b: Option<u32>,
    /// Effective-medium background law.
    #[arg(long)]
    spec: Option<DegreeSpec>,
    #[arg(long, default_value_t = 0.5)]
    p1: f64,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    gamma: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3")]
    radii: Vec<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Preset name, e.g. fig3 or fig6_bimodal_L; overrides the file's choice.
    #[arg(long)]
    experiment: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    samples: Option<usize>,
    /// Comma-separated graph sizes.
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Extra `key=value` settings applied last.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args)]
struct PhaseArgs {
    /// Comma-separated mean degrees.
    #[arg(long, value_delimiter = ',', required = true)]
    cbar: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Pd(a) => pd(a),
        Command::Ema(a) => ema(a),
        Command::Localize(a) => localize(a),
        Command::Experiment(a) => experiment(a),
        Command::PhaseDiagram(a) => phase_diagram(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("specdetect: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn config_err(e: impl ToString) -> CliError {
    CliError::Config(e.to_string())
}

fn runtime_err(e: impl ToString) -> CliError {
    CliError::Runtime(e.to_string())
}

/// Write a table to `out`, or to stdout when absent.
fn emit(out: Option<&PathBuf>, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    match out {
        Some(p) => write_table(p, header, rows)?,
        None => {
            let mut w = io::stdout().lock();
            writeln!(w, "{}", header.join(","))?;
            for r in rows {
                writeln!(w, "{}", row(r))?;
            }
        }
    }
    Ok(())
}

fn sample(g: &GraphArgs) -> Result<PlantedGraph, CliError> {
    let params = BlockParams::new(g.n, g.p1, g.gamma);
    params.validate(&g.spec).map_err(config_err)?;
    let degrees = sample_degree_sequence(&g.spec, &params, g.seed).map_err(runtime_err)?;
    generate_two_block_graph(&degrees, &planted_labels(&params), g.gamma, g.seed).map_err(runtime_err)
}

fn generate(a: GenerateArgs) -> Result<(), CliError> {
    let g = sample(&a.graph)?;
    match &a.out {
        Some(p) => {
            write_atomic(p, |w| write_edge_list(w, &g, a.graph.p1))?;
            write_atomic(&sibling(p, "labels"), |w| write_labels(w, &g))?;
        }
        None => write_edge_list(io::stdout().lock(), &g, a.graph.p1)?,
    }
    eprintln!("n={} edges={} cross={}", g.n(), g.edge_count(), g.cross_edge_count());
    Ok(())
}

fn spectrum(a: SpectrumArgs) -> Result<(), CliError> {
    let header = ["n", "component", "lambda2", "ipr", "overlap", "residual"];
    let graph = if let Some(path) = &a.graph {
        let edges = read_edge_list(BufReader::new(File::open(path).map_err(config_err)?)).map_err(config_err)?;
        let labels_path = a.labels.as_ref().expect("clap enforces --labels");
        let labels = read_labels(BufReader::new(File::open(labels_path).map_err(config_err)?))
            .map_err(config_err)?;
        let g = PlantedGraph::from_edges(edges.n, &edges.edges, labels, edges.gamma, edges.seed).map_err(config_err)?;
        g
    } else {
        let spec = a.spec.clone().ok_or_else(|| config_err("either --graph or --spec is required"))?;
        let gamma = a.gamma.ok_or_else(|| config_err("--gamma is required with --spec"))?;
        sample(&GraphArgs { spec, n: a.n, p1: a.p1, gamma, seed: a.seed })?
    };
    let n = graph.n();
    let (graph, _) = graph.largest_component();
    let m = specdetect::build_laplacian(&graph, a.laplacian).map_err(runtime_err)?;
    let z = specdetect::zero_mode(&graph, a.laplacian);
    let r = specdetect::second_smallest_eigenpair(&m, &z, a.seed).map_err(runtime_err)?;
    let fields = vec![
        n.to_string(),
        graph.n().to_string(),
        real(r.lambda2),
        real(specdetect::ipr(&r.vector).map_err(runtime_err)?),
        real(specdetect::overlap(&r.vector, &graph.labels).map_err(runtime_err)?),
        real(r.residual),
    ];
    emit(None, &header, &[fields])?;
    if let Some(p) = &a.vector_out {
        write_atomic(p, |w| {
            for x in &r.vector {
                writeln!(w, "{}", real(*x))?;
            }
            Ok(())
        })?;
    }
    Ok(())
}

fn pd(a: PdArgs) -> Result<(), CliError> {
    let config = PdConfig {
        population_size: a.population,
        equilibration_sweeps: a.equilibration,
        measurement_sweeps: a.measurement,
        phi_bisection_tolerance: a.tolerance,
        h_init: if a.symmetric { HInit::Gaussian } else { HInit::ModuleSign },
        ..PdConfig::new(a.model, a.spec.clone(), a.p1, a.gamma, a.seed)
    };
    config.validate().map_err(config_err)?;
    let r = run_population_dynamics(&config).map_err(runtime_err)?;
    let functional = match a.functional_pairs {
        Some(k) => Some(evaluate_lambda2(&r, &config, k).map_err(runtime_err)?),
        None => None,
    };
    let d = element_distribution(&r, a.bins, None).map_err(runtime_err)?;
    let write = |w: &mut dyn Write| -> io::Result<()> {
        writeln!(
            w,
            "model,spec,p1,gamma,phi,lambda2,lambda2_functional,lambda2_functional_se,fraction_correct,orthogonality_residual,normalization_residual"
        )?;
        writeln!(
            w,
            "{}",
            row(&[
                a.model.to_string(),
                a.spec.to_string(),
                real(a.p1),
                real(a.gamma),
                real(r.phi),
                real(r.lambda2),
                opt_real(functional.map(|f| f.value)),
                opt_real(functional.map(|f| f.std_error)),
                real(r.fraction_correct),
                real(r.orthogonality_residual),
                real(r.normalization_residual),
            ])
        )?;
        writeln!(w, "module,bin_center,density")?;
        for (m, h) in d.histograms.iter().enumerate() {
            for (c, p) in h.centers().zip(&h.density) {
                writeln!(w, "{},{},{}", m + 1, real(c), real(*p))?;
            }
        }
        Ok(())
    };
    match &a.out {
        Some(p) => write_atomic(p, write)?,
        None => write(&mut io::stdout().lock())?,
    }
    Ok(())
}

fn ema(a: EmaArgs) -> Result<(), CliError> {
    let header = ["model", "c_or_cbar", "p1", "gamma", "delta", "lambda2", "detectable", "m11_sq", "fraction_correct"];
    let cbar = a.spec.mean_degree();
    let mut rows = Vec::new();
    let model = a.model.to_ascii_lowercase();
    if model == "sbm" {
        if a.delta.is_empty() {
            return Err(config_err("sbm needs --delta"));
        }
        for &d in &a.delta {
            let l = sbm_lambda2_curve(cbar, d).map_err(config_err)?;
            let gamma = (cbar - 0.5 * d) / 4.0;
            rows.push(vec![model.clone(), real(cbar), real(0.5), real(gamma), real(d), real(l), "NA".into(), "NA".into(), "NA".into()]);
        }
        return emit(a.out.as_ref(), &header, &rows);
    }
    let grid: Vec<(f64, Option<f64>)> = if !a.delta.is_empty() {
        if a.p1 != 0.5 {
            return Err(config_err("--delta needs --p1 0.5"));
        }
        a.delta.iter().map(|&d| ((cbar - 0.5 * d) / 4.0, Some(d))).collect()
    } else if !a.gamma.is_empty() {
        a.gamma.iter().map(|&g| (g, (a.p1 == 0.5).then(|| 2.0 * cbar - 8.0 * g))).collect()
    } else {
        return Err(config_err("give --gamma or --delta"));
    };
    for (gamma, delta) in grid {
        let (sol, fraction) = match model.as_str() {
            "regular" => {
                let DegreeSpec::Regular { c } = a.spec else { return Err(config_err("regular needs a regular spec")) };
                let s = regular_solution(c, a.p1, gamma).map_err(config_err)?;
                (s, gaussian_fraction_correct(&FractionModel::RegularL { c }, a.p1, gamma).ok())
            }
            "ratiocut" => (ratiocut_ema(&a.spec, a.p1, gamma).map_err(config_err)?.0, None),
            "ncut" => {
                let s = ncut_ema(&a.spec, a.p1, gamma).map_err(config_err)?;
                (s, gaussian_fraction_correct(&FractionModel::NcutGeneral { spec: a.spec.clone() }, a.p1, gamma).ok())
            }
            m => return Err(config_err(format!("unknown model '{m}'"))),
        };
        rows.push(vec![
            model.clone(),
            real(cbar),
            real(a.p1),
            real(gamma),
            opt_real(delta),
            real(sol.lambda2),
            sol.detectable.to_string(),
            real(sol.m11_sq),
            opt_real(fraction),
        ]);
    }
    emit(a.out.as_ref(), &header, &rows)
}

fn localize(a: LocalizeArgs) -> Result<(), CliError> {
    let header = ["kind", "c_d", "background", "g", "lambda", "kappa", "finite_norm", "winner"];
    let mut rows = Vec::new();
    let kind = a.laplacian;
    let push = |rows: &mut Vec<Vec<String>>, c_d: u32, bg: &Background, g: u32, mode: Option<specdetect::LocalizedMode>, winner: Option<String>| {
        rows.push(vec![
            kind.to_string(),
            c_d.to_string(),
            bg.to_string(),
            g.to_string(),
            opt_real(mode.as_ref().map(|m| m.lambda)),
            opt_real(mode.as_ref().map(|m| m.kappa)),
            opt(mode.as_ref().map(|m| m.finite_norm)),
            winner.unwrap_or_else(|| "NA".into()),
        ]);
    };
    match (&a.spec, a.c_b) {
        (None, Some(c_b)) => {
            let c_d = a.c_d.ok_or_else(|| config_err("--c-d is required with --c-b"))?;
            let bg = Background::Uniform { c_b };
            for &g in &a.radii {
                let tree = DefectTree { c_d, g, background: bg.clone() };
                tree.validate().map_err(config_err)?;
                push(&mut rows, c_d, &bg, g, localized_mode_uniform(kind, &tree), None);
            }
        }
        (Some(spec), None) => {
            let c_d = match a.c_d.or_else(|| spec.defect_and_background().map(|d| d.0)) {
                Some(c) => c,
                None => return Err(config_err("--c-d is required for this spec")),
            };
            for &gamma in &a.gamma {
                let community = match kind {
                    LaplacianKind::Unnormalized => match spec {
                        DegreeSpec::Regular { c } => regular_solution(*c, a.p1, gamma).map(|s| s.lambda2),
                        _ => ratiocut_ema(spec, a.p1, gamma).map(|s| s.0.lambda2),
                    },
                    LaplacianKind::Normalized => ncut_ema(spec, a.p1, gamma).map(|s| s.lambda2),
                }
                .map_err(config_err)?;
                let bg = Background::Ema { spec: spec.clone(), p1: a.p1, gamma };
                for &g in &a.radii {
                    let tree = DefectTree { c_d, g, background: bg.clone() };
                    let mode = localized_mode_ema(kind, &tree).map_err(runtime_err)?;
                    let winner = localization_compare(community, mode.as_ref()).winner.to_string();
                    push(&mut rows, c_d, &bg, g, mode, Some(winner));
                }
            }
        }
        _ => return Err(config_err("give exactly one of --c-b or --spec")),
    }
    emit(a.out.as_ref(), &header, &rows)
}

fn experiment(a: ExperimentArgs) -> Result<(), CliError> {
    let mut config = match (&a.config, &a.experiment) {
        (Some(p), None) => ExperimentConfig::from_file(p)?,
        // The flag picks the preset; the file's other keys still apply.
        (Some(p), Some(e)) => {
            let text = std::fs::read_to_string(p).map_err(config_err)?;
            ExperimentConfig::parse(&format!("experiment = {e}\n{}", strip_experiment(&text)))?
        }
        (None, Some(e)) => ExperimentConfig::preset(e.parse()?),
        (None, None) => ExperimentConfig::preset(ExperimentKind::Custom),
    };
    if let Some(s) = a.samples {
        config.samples = s;
    }
    if let Some(n) = &a.n {
        config.set("n", n)?;
    }
    if let Some(s) = a.seed {
        config.base_seed = s;
    }
    if let Some(o) = &a.out {
        config.output = Some(o.clone());
    }
    for kv in &a.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| config_err(format!("--set expects KEY=VALUE, got '{kv}'")))?;
        config.set(k.trim(), v.trim())?;
    }
    if config.output.is_none() {
        return Err(config_err("no output path: give --out or set out in the config"));
    }
    let out = run_experiment(&config)?;
    let failed = out.failed_rows();
    eprintln!("{} rows, {} failed", out.records.len().max(out.phase.len()), failed);
    if failed > 0 {
        return Err(runtime_err(format!("{failed} rows failed; partial output written")));
    }
    Ok(())
}

fn strip_experiment(text: &str) -> String {
    text.lines()
        .filter(|l| l.split('=').next().map(str::trim) != Some("experiment"))
        .collect::<Vec<_>>()
        .join("\n")
}

fn phase_diagram(a: PhaseArgs) -> Result<(), CliError> {
    let rows = emit_phase_diagram(&a.cbar)?;
    match &a.out {
        Some(p) => write_phase_diagram(p, &rows),
        None => {
            let fields: Vec<_> = rows.iter().map(phase_fields).collect();
            emit(None, &PHASE_HEADER, &fields)
        }
    }
}
