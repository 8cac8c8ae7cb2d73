//! Experiment harness for `specdetect`: figure presets, parameter sweeps over
//! sampled graphs and CSV output.

pub mod config;
pub mod csv;
pub mod experiment;
pub mod phase;

pub use config::{Case, ExperimentConfig, ExperimentKind, Grid};
pub use experiment::{
    analytics, measure, run_experiment, Analytics, ElementHistogram, ExperimentOutput, ExperimentRecord, Measurement,
    Stat, SummaryRow,
};
pub use phase::{emit_phase_diagram, PhaseRow};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("{0}")]
    Runtime(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 1 for bad input, 2 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::InvalidGrid(_) => 1,
            CliError::Runtime(_) | CliError::Io(_) => 2,
        }
    }
}

/// Environment variable bounding the worker pool.
pub const THREADS_VAR: &str = "SPECDETECT_THREADS";

pub fn thread_count() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(None),
        Ok(v) if v.trim().is_empty() => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(k) if k > 0 => Ok(Some(k)),
            _ => Err(CliError::Config(format!("{THREADS_VAR} must be a positive integer, got '{v}'"))),
        },
    }
}

pub fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(k) = thread_count()? {
        b = b.num_threads(k);
    }
    b.build().map_err(|e| CliError::Runtime(e.to_string()))
}
