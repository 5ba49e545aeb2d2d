//! Dyadic frequency calculus: the cutoff pair `φ0`/`φ`, band and low-pass
//! projections, and homogeneous Besov `Ḃ^s_{∞,∞}` norms.
//!
//! `φ0` is a fixed C^∞ radial profile equal to 1 on `[0, 1]` and 0 beyond
//! `7/6`; `φ(r) = φ0(r) − φ0(2r)` is then supported in `[1/2, 7/6]`. Band
//! `j` keeps Fourier content with weight `φ(2^{-j}|ξ|)`, so it lives in the
//! annulus `2^{j-1} ≤ |ξ| ≤ (7/6)·2^j` and `P_j P_{j'} = 0` once `|j − j'| > 1`.
//!
//! The sum over `j ∈ ℤ` is truncated to a [`BandIndexRange`]: the bands whose
//! annuli meet the nonzero lattice and stay inside the dealiased ball.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{to_physical, SpectralVectorField};
use crate::grid::Grid;

/// Upper edge of the `φ0` transition.
pub const OUTER_RADIUS: f64 = 7.0 / 6.0;

/// The radial cutoff pair `φ0`, `φ`.
///
/// The transition of `φ0` on `(1, 7/6)` is the smooth step
/// `s(t) = h(t) / (h(t) + h(1 − t))` with `h(t) = exp(−1/t)` for `t > 0`,
/// evaluated at `t = (7/6 − r) / (1/6)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CutoffProfile;

impl CutoffProfile {
    pub fn new() -> Self {
        CutoffProfile
    }

    /// Low-pass profile: 1 for `r ≤ 1`, 0 for `r ≥ 7/6`, smooth and monotone between.
    pub fn phi0(&self, r: f64) -> f64 {
        if r <= 1.0 {
            1.0
        } else if r >= OUTER_RADIUS {
            0.0
        } else {
            smooth_step(7.0 - 6.0 * r)
        }
    }

    /// Band profile `φ(r) = φ0(r) − φ0(2r)`.
    pub fn phi(&self, r: f64) -> f64 {
        self.phi0(r) - self.phi0(2.0 * r)
    }
}

fn bump(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

fn smooth_step(t: f64) -> f64 {
    let a = bump(t);
    let b = bump(1.0 - t);
    a / (a + b)
}

/// Returns the fixed cutoff profile.
pub fn make_cutoff() -> CutoffProfile {
    CutoffProfile::new()
}

/// Inclusive range of resolvable dyadic band indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BandIndexRange {
    pub j_min: i32,
    pub j_max: i32,
}

impl BandIndexRange {
    pub fn new(j_min: i32, j_max: i32) -> Result<Self> {
        if j_min > j_max {
            return Err(Error::InvalidParameter(format!("empty band range {j_min}..={j_max}")));
        }
        Ok(Self { j_min, j_max })
    }

    pub fn contains(&self, j: i32) -> bool {
        (self.j_min..=self.j_max).contains(&j)
    }

    pub fn iter(&self) -> impl Iterator<Item = i32> {
        self.j_min..=self.j_max
    }

    pub fn len(&self) -> usize {
        (self.j_max - self.j_min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Errors with [`Error::UnresolvableBand`] when `j` is outside the range.
    pub fn check(&self, j: i32) -> Result<()> {
        if self.contains(j) {
            Ok(())
        } else {
            Err(Error::UnresolvableBand {
                j,
                j_min: self.j_min,
                j_max: self.j_max,
            })
        }
    }
}

/// Bands that fit on `grid` below `dealias_cutoff` (a radius in wavenumber units).
///
/// `j_min` is the smallest band whose open annulus `(2^{j−1}, (7/6)2^j)`
/// contains a nonzero lattice modulus; `j_max` is the largest band with
/// `(7/6)·2^j ≤ dealias_cutoff`.
pub fn band_range(grid: &Grid, _cutoff: &CutoffProfile, dealias_cutoff: f64) -> Result<BandIndexRange> {
    if !(dealias_cutoff > 0.0) || dealias_cutoff > grid.max_axis_wavenumber() * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "dealias cutoff {dealias_cutoff} outside (0, {}]",
            grid.max_axis_wavenumber()
        )));
    }
    let r_min = grid.min_modulus();
    let mut j_min = -64;
    while OUTER_RADIUS * 2f64.powi(j_min) <= r_min {
        j_min += 1;
    }
    let mut j_max = j_min - 1;
    while OUTER_RADIUS * 2f64.powi(j_max + 1) <= dealias_cutoff {
        j_max += 1;
    }
    if j_max < j_min {
        return Err(Error::EmptyBandRange { cutoff: dealias_cutoff });
    }
    Ok(BandIndexRange { j_min, j_max })
}

/// Multiplies by `φ(2^{-j}|ξ|)` without a range check.
pub(crate) fn band_unchecked(f: &SpectralVectorField, cutoff: &CutoffProfile, j: i32) -> SpectralVectorField {
    let grid = f.grid().clone();
    let scale = 2f64.powi(-j);
    f.map_multiplier(|flat| cutoff.phi(scale * grid.modulus(flat)))
}

/// Multiplies by `φ0(2^{-j}|ξ|)` without a range check.
pub(crate) fn low_unchecked(f: &SpectralVectorField, cutoff: &CutoffProfile, j: i32) -> SpectralVectorField {
    let grid = f.grid().clone();
    let scale = 2f64.powi(-j);
    f.map_multiplier(|flat| cutoff.phi0(scale * grid.modulus(flat)))
}

/// Band projection `P_j`. Errors when `j` lies outside `range`.
pub fn project_band(
    f: &SpectralVectorField,
    cutoff: &CutoffProfile,
    range: &BandIndexRange,
    j: i32,
) -> Result<SpectralVectorField> {
    range.check(j)?;
    Ok(band_unchecked(f, cutoff, j))
}

/// Low-pass projection `P_{≤j}`.
///
/// Any `j ≤ j_max` is accepted: below the range the multiplier simply
/// vanishes on the nonzero lattice. Above `j_max` the band is unresolvable.
pub fn project_low(
    f: &SpectralVectorField,
    cutoff: &CutoffProfile,
    range: &BandIndexRange,
    j: i32,
) -> Result<SpectralVectorField> {
    if j > range.j_max {
        return Err(Error::UnresolvableBand {
            j,
            j_min: range.j_min,
            j_max: range.j_max,
        });
    }
    Ok(low_unchecked(f, cutoff, j))
}

/// `‖P_j f‖_∞` for every band in `range`, in order.
pub fn band_sup_norms(f: &SpectralVectorField, cutoff: &CutoffProfile, range: &BandIndexRange) -> Vec<f64> {
    range
        .iter()
        .map(|j| to_physical(&band_unchecked(f, cutoff, j)).sup_norm())
        .collect()
}

/// `max_j 2^{js}·sups[j − j_min]`, given precomputed band sup norms.
pub fn besov_from_band_sups(band_sups: &[f64], range: &BandIndexRange, s: f64) -> f64 {
    range
        .iter()
        .zip(band_sups)
        .map(|(j, &sup)| 2f64.powf(j as f64 * s) * sup)
        .fold(0.0, f64::max)
}

/// Truncated homogeneous Besov norm `sup_{j ∈ range} 2^{js} ‖P_j f‖_∞`.
pub fn besov_norm(f: &SpectralVectorField, cutoff: &CutoffProfile, s: f64, range: &BandIndexRange) -> Result<f64> {
    if range.j_min > range.j_max {
        return Err(Error::InvalidParameter("empty band range".into()));
    }
    Ok(besov_from_band_sups(&band_sup_norms(f, cutoff, range), range, s))
}
