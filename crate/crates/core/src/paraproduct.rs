//! The convection term `(v·∇)v`, its Bony paraproduct split, and the
//! empirical check of the product estimate
//! `‖P_j((v·∇)v)‖_∞ ≲ 2^{j(2−γ)} ‖v‖_{Ḃ^{-1}} ‖v‖_{Ḃ^γ}` for `γ > 1`.
//!
//! Every pointwise product is formed on the collocation grid, transformed
//! back and truncated with the 2/3 rule, so the split terms and the full
//! convection term see exactly the same dealiasing.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::{self, Direction};
use crate::field::{gradient_term, to_physical, SpectralVectorField};
use crate::grid::{Grid, DEFAULT_DEALIAS_FRACTION};
use crate::littlewood_paley::{
    band_sup_norms, band_unchecked, besov_from_band_sups, low_unchecked, BandIndexRange, CutoffProfile,
};

fn forward_real(grid: &Grid, values: &[f64]) -> Vec<Complex64> {
    let mut data: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft::transform(grid, &mut data, Direction::Forward);
    data
}

/// `(a·∇)b`, dealiased and mean-free.
pub fn advect(a: &SpectralVectorField, b: &SpectralVectorField, dealias_fraction: f64) -> Result<SpectralVectorField> {
    a.check_same_grid(b)?;
    let grid = a.grid();
    let dim = grid.dim();
    let a_phys = to_physical(a);
    let mut acc = vec![vec![0.0; grid.len()]; dim];
    for m in 0..dim {
        let db = to_physical(&gradient_term(b, m)?);
        let am = a_phys.component(m);
        for (i, out) in acc.iter_mut().enumerate() {
            out.par_iter_mut()
                .zip(am.par_iter().zip(db.component(i).par_iter()))
                .for_each(|(o, (&x, &y))| *o += x * y);
        }
    }
    let coeffs = acc.iter().map(|c| forward_real(grid, c)).collect();
    Ok(SpectralVectorField::from_parts(grid, coeffs).dealias(dealias_fraction))
}

/// `∇·(a ⊗ b)`, i.e. component `i` is `Σ_m ∂_m(a_m b_i)`; dealiased and mean-free.
pub fn divergence_of_tensor(
    a: &SpectralVectorField,
    b: &SpectralVectorField,
    dealias_fraction: f64,
) -> Result<SpectralVectorField> {
    a.check_same_grid(b)?;
    let grid = a.grid();
    let dim = grid.dim();
    let a_phys = to_physical(a);
    let b_phys = to_physical(b);
    let mut out = SpectralVectorField::zeros(grid);
    for m in 0..dim {
        let flux: Vec<Vec<Complex64>> = (0..dim)
            .map(|i| {
                let prod: Vec<f64> = a_phys
                    .component(m)
                    .par_iter()
                    .zip(b_phys.component(i).par_iter())
                    .map(|(&x, &y)| x * y)
                    .collect();
                forward_real(grid, &prod)
            })
            .collect();
        let flux = SpectralVectorField::from_parts(grid, flux).dealias(dealias_fraction);
        out.add_assign(&gradient_term(&flux, m)?)?;
    }
    Ok(out)
}

/// Pseudo-spectral convection term `(v·∇)v` with 2/3-rule dealiasing.
pub fn convection(v: &SpectralVectorField) -> SpectralVectorField {
    convection_with(v, DEFAULT_DEALIAS_FRACTION)
}

/// As [`convection`] with an explicit dealias fraction.
pub fn convection_with(v: &SpectralVectorField, dealias_fraction: f64) -> SpectralVectorField {
    advect(v, v, dealias_fraction).expect("operands share a grid")
}

/// The three paraproduct sums of `(v·∇)v`:
/// `A = Σ_l (v_{≤l−2}·∇)v_l`, `B = Σ_l (v_l·∇)v_{≤l−2}`,
/// `C = Σ_l ∇·(v_l ⊗ ṽ_l)` with `ṽ_l = v_{l−1} + v_l + v_{l+1}`.
#[derive(Clone, Debug)]
pub struct BonySplit {
    pub term_a: SpectralVectorField,
    pub term_b: SpectralVectorField,
    pub term_c: SpectralVectorField,
    pub range: BandIndexRange,
    /// Set when `v` has content outside the summed bands, in which case
    /// `A + B + C` cannot reconstruct the full convection term.
    pub truncated: bool,
}

impl BonySplit {
    pub fn total(&self) -> SpectralVectorField {
        let mut t = self.term_a.clone();
        t.add_assign(&self.term_b).expect("same grid");
        t.add_assign(&self.term_c).expect("same grid");
        t
    }
}

/// Splits `(v·∇)v` into low–high, high–low and high–high interactions over `range`.
pub fn bony_split(v: &SpectralVectorField, cutoff: &CutoffProfile, range: &BandIndexRange) -> Result<BonySplit> {
    bony_split_with(v, cutoff, range, DEFAULT_DEALIAS_FRACTION)
}

pub fn bony_split_with(
    v: &SpectralVectorField,
    cutoff: &CutoffProfile,
    range: &BandIndexRange,
    dealias_fraction: f64,
) -> Result<BonySplit> {
    let grid = v.grid();
    // bands j_min-1 ..= j_max+1, so ṽ_l is available at both ends
    let bands: Vec<SpectralVectorField> = (range.j_min - 1..=range.j_max + 1)
        .map(|l| band_unchecked(v, cutoff, l))
        .collect();
    let band = |l: i32| &bands[(l - range.j_min + 1) as usize];

    let mut resolved = SpectralVectorField::zeros(grid);
    for l in range.iter() {
        resolved.add_assign(band(l))?;
    }
    let residual = v.sub(&resolved)?.max_abs();
    let truncated = residual > 1e-12 * v.max_abs();

    let mut term_a = SpectralVectorField::zeros(grid);
    let mut term_b = SpectralVectorField::zeros(grid);
    let mut term_c = SpectralVectorField::zeros(grid);
    for l in range.iter() {
        let v_l = band(l);
        if v_l.max_abs() == 0.0 {
            continue;
        }
        let low = low_unchecked(v, cutoff, l - 2);
        if low.max_abs() > 0.0 {
            term_a.add_assign(&advect(&low, v_l, dealias_fraction)?)?;
            term_b.add_assign(&advect(v_l, &low, dealias_fraction)?)?;
        }
        let mut tilde = band(l - 1).clone();
        tilde.add_assign(v_l)?;
        tilde.add_assign(band(l + 1))?;
        term_c.add_assign(&divergence_of_tensor(v_l, &tilde, dealias_fraction)?)?;
    }

    Ok(BonySplit {
        term_a,
        term_b,
        term_c,
        range: *range,
        truncated,
    })
}

/// One evaluation of the product estimate at band `j`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Report {
    pub j: i32,
    pub gamma: f64,
    /// `‖P_j((v·∇)v)‖_∞`
    pub lhs: f64,
    /// `2^{j(2−γ)} ‖v‖_{Ḃ^{-1}} ‖v‖_{Ḃ^γ}`
    pub rhs_factor: f64,
    pub ratio: f64,
}

fn ratio_of(lhs: f64, rhs: f64) -> Result<f64> {
    if lhs == 0.0 {
        Ok(0.0)
    } else if rhs == 0.0 {
        Err(Error::Inconsistent(format!(
            "product estimate has lhs {lhs} but vanishing right-hand side"
        )))
    } else {
        Ok(lhs / rhs)
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 1.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "product estimate needs gamma > 1, got {gamma}"
        )))
    }
}

/// Evaluates the product estimate at a single band `j`.
pub fn lemma1_check(
    v: &SpectralVectorField,
    cutoff: &CutoffProfile,
    j: i32,
    gamma: f64,
    range: &BandIndexRange,
) -> Result<Lemma1Report> {
    check_gamma(gamma)?;
    if !range.contains(j) {
        return Err(Error::UnresolvableBand {
            j,
            j_min: range.j_min,
            j_max: range.j_max,
        });
    }
    let conv = convection(v);
    let sups = band_sup_norms(v, cutoff, range);
    report_at(&conv, cutoff, j, gamma, range, &sups)
}

/// Evaluates the product estimate at every band of `range`, sharing the
/// convection term and the Besov norms across bands.
pub fn lemma1_scan(
    v: &SpectralVectorField,
    cutoff: &CutoffProfile,
    gamma: f64,
    range: &BandIndexRange,
) -> Result<Vec<Lemma1Report>> {
    check_gamma(gamma)?;
    let conv = convection(v);
    let sups = band_sup_norms(v, cutoff, range);
    range
        .iter()
        .map(|j| report_at(&conv, cutoff, j, gamma, range, &sups))
        .collect()
}

fn report_at(
    conv: &SpectralVectorField,
    cutoff: &CutoffProfile,
    j: i32,
    gamma: f64,
    range: &BandIndexRange,
    band_sups: &[f64],
) -> Result<Lemma1Report> {
    let lhs = to_physical(&band_unchecked(conv, cutoff, j)).sup_norm();
    let critical = besov_from_band_sups(band_sups, range, -1.0);
    let subcritical = besov_from_band_sups(band_sups, range, gamma);
    let rhs_factor = 2f64.powf(j as f64 * (2.0 - gamma)) * critical * subcritical;
    let ratio = ratio_of(lhs, rhs_factor)?;
    Ok(Lemma1Report {
        j,
        gamma,
        lhs,
        rhs_factor,
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{leray_project, RealVectorField};
    use crate::grid::make_grid;
    use crate::littlewood_paley::{band_range, make_cutoff};
    use std::f64::consts::PI;

    fn taylor_green(n: usize) -> SpectralVectorField {
        let g = make_grid(2, n, 2.0 * PI).unwrap();
        RealVectorField::from_fn(&g, |x| vec![x[0].sin() * x[1].cos(), -x[0].cos() * x[1].sin()])
            .unwrap()
            .to_spectral()
    }

    #[test]
    fn taylor_green_convection_matches_symbolic_gradient() {
        let u = taylor_green(32);
        let conv = convection(&u);
        // (u·∇)u = (½ sin 2x₁, ½ sin 2x₂) = -∇(¼ cos 2x₁ + ¼ cos 2x₂)
        let want =
            RealVectorField::from_fn(u.grid(), |x| vec![0.5 * (2.0 * x[0]).sin(), 0.5 * (2.0 * x[1]).sin()]).unwrap();
        let got = to_physical(&conv);
        for c in 0..2 {
            for (a, b) in got.component(c).iter().zip(want.component(c)) {
                assert!((a - b).abs() < 1e-13);
            }
        }
        assert!(leray_project(&conv).max_abs() < 1e-14);
    }

    #[test]
    fn shear_mode_has_no_convection() {
        let g = make_grid(3, 16, 2.0 * PI).unwrap();
        let v = RealVectorField::from_fn(&g, |x| vec![x[1].cos(), 0.0, 0.0])
            .unwrap()
            .to_spectral();
        assert_eq!(convection(&v).max_abs(), 0.0);
        assert_eq!(convection(&SpectralVectorField::zeros(&g)).max_abs(), 0.0);
    }

    #[test]
    fn zero_field_split_is_zero() {
        let g = make_grid(3, 16, 2.0 * PI).unwrap();
        let c = make_cutoff();
        let r = band_range(&g, &c, g.dealias_cutoff(DEFAULT_DEALIAS_FRACTION)).unwrap();
        let s = bony_split(&SpectralVectorField::zeros(&g), &c, &r).unwrap();
        assert_eq!(s.term_a.max_abs(), 0.0);
        assert_eq!(s.term_b.max_abs(), 0.0);
        assert_eq!(s.term_c.max_abs(), 0.0);
        assert!(!s.truncated);
    }

    #[test]
    fn gamma_must_exceed_one() {
        let u = taylor_green(16);
        let c = make_cutoff();
        let r = band_range(u.grid(), &c, u.grid().dealias_cutoff(DEFAULT_DEALIAS_FRACTION)).unwrap();
        assert!(lemma1_check(&u, &c, 0, 1.0, &r).is_err());
        assert!(lemma1_check(&u, &c, 0, 0.5, &r).is_err());
        assert!(lemma1_check(&u, &c, r.j_max + 1, 1.5, &r).is_err());
        assert!(lemma1_check(&u, &c, 0, 1.5, &r).is_ok());
    }

    #[test]
    fn ratio_conventions() {
        assert_eq!(ratio_of(0.0, 0.0).unwrap(), 0.0);
        assert_eq!(ratio_of(0.0, 3.0).unwrap(), 0.0);
        assert_eq!(ratio_of(1.0, 4.0).unwrap(), 0.25);
        assert!(matches!(ratio_of(1.0, 0.0), Err(Error::Inconsistent(_))));
    }
}
