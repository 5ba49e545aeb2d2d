//! Seeded random fields for integration tests.
#![allow(dead_code)]

use lpns::prelude::*;
use lpns::Complex64;
use proptest::prelude::RngExt;
use proptest::test_runner::{RngAlgorithm, TestRng};

pub fn rng(seed: u64) -> TestRng {
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed.to_le_bytes());
    TestRng::from_seed(RngAlgorithm::ChaCha, &bytes)
}

/// Uniform coefficients in `[-1, 1]²` on modes with `lo < |ξ| ≤ hi`,
/// conjugate-symmetrized so the field is real.
pub fn random_field(grid: &Grid, seed: u64, lo: f64, hi: f64) -> SpectralVectorField {
    let mut r = rng(seed);
    let zero = Complex64::new(0.0, 0.0);
    let mut coeffs = vec![vec![zero; grid.len()]; grid.dim()];
    for flat in 1..grid.len() {
        let partner = grid.partner(flat);
        let m = grid.modulus(flat);
        if partner < flat || m <= lo || m > hi {
            continue;
        }
        for c in coeffs.iter_mut() {
            let re = 2.0 * r.random::<f64>() - 1.0;
            let im = if partner == flat {
                0.0
            } else {
                2.0 * r.random::<f64>() - 1.0
            };
            c[flat] = Complex64::new(re, im);
            c[partner] = Complex64::new(re, -im);
        }
    }
    SpectralVectorField::new(grid, coeffs).unwrap()
}

pub fn random_solenoidal(grid: &Grid, seed: u64, lo: f64, hi: f64) -> SpectralVectorField {
    leray_project(&random_field(grid, seed, lo, hi))
}

/// Band range under the default 2/3 dealiasing.
pub fn range(grid: &Grid) -> BandIndexRange {
    band_range(grid, &make_cutoff(), grid.dealias_cutoff(DEFAULT_DEALIAS_FRACTION)).unwrap()
}

/// Modulus window `(2^{j_min−1}, 2^{j_max}]` where the band sum is exact.
pub fn resolved_window(range: &BandIndexRange) -> (f64, f64) {
    (2f64.powi(range.j_min - 1), 2f64.powi(range.j_max))
}

pub fn max_diff(a: &SpectralVectorField, b: &SpectralVectorField) -> f64 {
    to_physical(&a.sub(b).unwrap()).sup_norm()
}
