//! Seeded random divergence-free fields with prescribed per-band sup norms.
//!
//! Band `j` is seeded on the lattice shell `(7/12)2^j ≤ |ξ| ≤ 2^j` with
//! complex Gaussian coefficients and Leray-projected. On that shell the band-`j`
//! cutoff is identically 1 and every other band cutoff vanishes, so
//! `P_j v` is exactly the band-`j` shell and one rescaling per band hits
//! each target.

use lpns::field::{leray_project, to_physical, SpectralVectorField};
use lpns::grid::{Grid, DEFAULT_DEALIAS_FRACTION};
use lpns::littlewood_paley::{band_range, make_cutoff, BandIndexRange, OUTER_RADIUS};
use lpns::monitor::critical_norm;
use lpns::{Complex64, Error, Result};

use crate::rng::{CounterRng, STREAM_FIELD};

/// Which bands to populate and the sup norm each should reach.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomFieldSpec {
    /// `(j, ‖P_j v‖_∞)` pairs; every target is positive and every `j` distinct.
    pub bands: Vec<(i32, f64)>,
    pub seed: u64,
}

impl RandomFieldSpec {
    /// Targets `amplitude · 2^{−j·exponent}` on every band of `range`.
    pub fn profile(range: &BandIndexRange, amplitude: f64, exponent: f64, seed: u64) -> Self {
        let bands = range
            .iter()
            .map(|j| (j, amplitude * 2f64.powf(-(j as f64) * exponent)))
            .collect();
        Self { bands, seed }
    }

    pub fn single_band(j: i32, target: f64, seed: u64) -> Self {
        Self {
            bands: vec![(j, target)],
            seed,
        }
    }
}

/// Band range of `grid` under the default 2/3 dealiasing.
pub fn default_range(grid: &Grid) -> Result<BandIndexRange> {
    band_range(grid, &make_cutoff(), grid.dealias_cutoff(DEFAULT_DEALIAS_FRACTION))
}

fn validate(spec: &RandomFieldSpec, range: &BandIndexRange) -> Result<()> {
    if spec.bands.is_empty() {
        return Err(Error::InvalidParameter("random field needs at least one band".into()));
    }
    for (i, &(j, target)) in spec.bands.iter().enumerate() {
        range.check(j)?;
        if !(target > 0.0) || !target.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "band {j} target {target} must be positive"
            )));
        }
        if spec.bands[..i].iter().any(|&(other, _)| other == j) {
            return Err(Error::InvalidParameter(format!("band {j} listed twice")));
        }
    }
    Ok(())
}

/// Band `j` owning a mode of modulus `r`, if that band is among `bands`.
fn shell_of(r: f64, bands: &[(i32, f64)]) -> Option<usize> {
    bands.iter().position(|&(j, _)| {
        let outer = 2f64.powi(j);
        r >= 0.5 * OUTER_RADIUS * outer && r <= outer
    })
}

/// One unnormalized Gaussian shell per targeted band, drawn in flat index order.
fn draw_shells(grid: &Grid, spec: &RandomFieldSpec) -> Vec<SpectralVectorField> {
    let d = grid.dim();
    let zero = Complex64::new(0.0, 0.0);
    let mut shells = vec![vec![vec![zero; grid.len()]; d]; spec.bands.len()];
    let mut rng = CounterRng::new(spec.seed, STREAM_FIELD);
    for flat in 1..grid.len() {
        let partner = grid.partner(flat);
        if partner < flat {
            continue;
        }
        let Some(b) = shell_of(grid.modulus(flat), &spec.bands) else {
            continue;
        };
        for c in 0..d {
            let (re, im) = rng.normal_pair();
            // self-conjugate modes carry real coefficients
            let z = if partner == flat {
                Complex64::new(re, 0.0)
            } else {
                Complex64::new(re, im)
            };
            shells[b][c][flat] = z;
            shells[b][c][partner] = z.conj();
        }
    }
    shells
        .into_iter()
        .map(|coeffs| leray_project(&SpectralVectorField::new(grid, coeffs).expect("finite draws")))
        .collect()
}

fn combine(grid: &Grid, shells: &[SpectralVectorField], weights: &[f64]) -> SpectralVectorField {
    let mut v = SpectralVectorField::zeros(grid);
    for (s, &w) in shells.iter().zip(weights) {
        v.add_assign(&s.scale(w)).expect("same grid");
    }
    v
}

/// Random mean-free, divergence-free field whose band sups match `spec`
/// up to transform round-off.
pub fn random_divfree_field(grid: &Grid, spec: &RandomFieldSpec) -> Result<SpectralVectorField> {
    let range = default_range(grid)?;
    validate(spec, &range)?;
    let shells = draw_shells(grid, spec);
    let mut weights = Vec::with_capacity(shells.len());
    for (s, &(j, target)) in shells.iter().zip(&spec.bands) {
        let sup = to_physical(s).sup_norm();
        if sup == 0.0 {
            return Err(Error::ZeroBand { j });
        }
        weights.push(target / sup);
    }
    Ok(combine(grid, &shells, &weights))
}

/// `v` rescaled so that its critical norm equals `target`.
pub fn scale_to_critical_norm(v: &SpectralVectorField, target: f64) -> Result<SpectralVectorField> {
    let range = default_range(v.grid())?;
    let current = critical_norm(v, &make_cutoff(), &range)?;
    if current == 0.0 {
        return Err(Error::InvalidParameter("cannot rescale a zero field".into()));
    }
    Ok(v.scale(target / current))
}
