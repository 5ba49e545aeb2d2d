//! Exact heat semigroup `e^{tΔ}` on the lattice and per-band decay fits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{to_physical, SpectralVectorField};
use crate::littlewood_paley::{project_band, BandIndexRange, CutoffProfile};

const ZERO_BAND_FLOOR: f64 = 1e-13;

/// Multiplies mode `k` by `exp(−|ξ_k|² t)`. Unit viscosity.
pub fn heat_apply(f: &SpectralVectorField, t: f64) -> Result<SpectralVectorField> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "heat time {t} must be finite and >= 0"
        )));
    }
    let xi_sq = f.grid().xi_squared();
    Ok(f.map_multiplier(|flat| (-xi_sq[flat] * t).exp()))
}

/// Observed decay of one band over time `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub j: i32,
    pub t: f64,
    /// `‖e^{tΔ}P_j f‖_∞ / ‖P_j f‖_∞`
    pub observed_ratio: f64,
    /// `−ln(observed_ratio) / (2^{2j} t)`
    pub fitted_c: f64,
}

/// Fits the decay constant `c` in `‖e^{tΔ}P_j f‖_∞ ≤ e^{−c 2^{2j} t}‖P_j f‖_∞`.
///
/// Every mode of band `j` has `|ξ| ≥ 2^{j−1}`, so up to collocation effects
/// `fitted_c ≥ 1/4`.
pub fn band_decay_check(
    f: &SpectralVectorField,
    cutoff: &CutoffProfile,
    range: &BandIndexRange,
    j: i32,
    t: f64,
) -> Result<DecayFit> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("decay time {t} must be positive")));
    }
    let band = project_band(f, cutoff, range, j)?;
    let before = to_physical(&band).sup_norm();
    // transform round-off leaves ~1e-17 residue in bands the field does not touch
    if before <= ZERO_BAND_FLOOR * to_physical(f).sup_norm() {
        return Err(Error::ZeroBand { j });
    }
    let after = to_physical(&heat_apply(&band, t)?).sup_norm();
    let observed_ratio = after / before;
    let fitted_c = -observed_ratio.ln() / (4f64.powi(j) * t);
    Ok(DecayFit {
        j,
        t,
        observed_ratio,
        fitted_c,
    })
}
