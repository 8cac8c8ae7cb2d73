//! Detectability phase diagram of the equal-module block model.

use std::path::Path;

use crate::csv::{real, write_table};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseRow {
    pub cbar: f64,
    /// Spectral threshold of the normalized Laplacian, `2c̄/√(c̄−1)`.
    pub delta_ema: f64,
    /// `2√c̄`.
    pub delta_ultimate: f64,
    /// `2c̄`, beyond which `c_out < 0`.
    pub delta_max: f64,
}

pub fn emit_phase_diagram(cbar_grid: &[f64]) -> Result<Vec<PhaseRow>, CliError> {
    if cbar_grid.is_empty() {
        return Err(CliError::InvalidGrid("empty mean-degree grid".into()));
    }
    cbar_grid
        .iter()
        .map(|&c| {
            if !(c > 1.0 && c.is_finite()) {
                return Err(CliError::InvalidGrid(format!("mean degree {c} must exceed 1")));
            }
            Ok(PhaseRow {
                cbar: c,
                delta_ema: 2.0 * c / (c - 1.0).sqrt(),
                delta_ultimate: 2.0 * c.sqrt(),
                delta_max: 2.0 * c,
            })
        })
        .collect()
}

pub const PHASE_HEADER: [&str; 4] = ["cbar", "delta_ema", "delta_ultimate", "delta_max"];

pub fn phase_fields(r: &PhaseRow) -> Vec<String> {
    vec![real(r.cbar), real(r.delta_ema), real(r.delta_ultimate), real(r.delta_max)]
}

pub fn write_phase_diagram(path: &Path, rows: &[PhaseRow]) -> Result<(), CliError> {
    let rows: Vec<_> = rows.iter().map(phase_fields).collect();
    write_table(path, &PHASE_HEADER, &rows)?;
    Ok(())
}
