//! Norm summary of a saved field.

use std::path::Path;

use lpns::checkpoint;
use lpns::littlewood_paley::{band_range, band_sup_norms, besov_from_band_sups, make_cutoff};
use serde::Serialize;

use crate::error::HarnessError;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldSummary {
    pub dim: usize,
    pub n: usize,
    pub period: f64,
    pub j_min: i32,
    pub j_max: i32,
    pub band_sups: Vec<(i32, f64)>,
    pub critical_norm: f64,
    pub gamma: f64,
    pub gamma_norm: f64,
    pub sup_norm: f64,
    pub energy: f64,
    pub divergence_residual: f64,
}

/// Reads an `LPNS` checkpoint and reports its band, Besov and sup norms.
pub fn inspect_checkpoint(path: &Path, gamma: f64, dealias_fraction: f64) -> Result<FieldSummary, HarnessError> {
    let field = checkpoint::load(path)?;
    let grid = field.grid().clone();
    let v = field.to_spectral();
    let cutoff = make_cutoff();
    if !(dealias_fraction > 0.0 && dealias_fraction <= 1.0) {
        return Err(HarnessError::Config(format!(
            "dealias fraction {dealias_fraction} outside (0, 1]"
        )));
    }
    let range = band_range(&grid, &cutoff, grid.dealias_cutoff(dealias_fraction))?;
    let sups = band_sup_norms(&v, &cutoff, &range);
    Ok(FieldSummary {
        dim: grid.dim(),
        n: grid.n(),
        period: grid.period(),
        j_min: range.j_min,
        j_max: range.j_max,
        band_sups: range.iter().zip(sups.iter().copied()).collect(),
        critical_norm: besov_from_band_sups(&sups, &range, -1.0),
        gamma,
        gamma_norm: besov_from_band_sups(&sups, &range, gamma),
        sup_norm: field.sup_norm(),
        energy: v.energy(),
        divergence_residual: v.divergence_residual(),
    })
}
