//! Vector fields on a [`Grid`] in physical and spectral form, and the
//! linear operators that act on them mode by mode.
//!
//! Spectral coefficients use the convention `f(x) = Σ_k c_k e^{iξ_k·x}`:
//! the forward transform carries `1/n^d` and the inverse carries 1, so a
//! single cosine of amplitude `A` has two coefficients of size `A/2`.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{self, Direction};
use crate::grid::Grid;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Collocation samples of a `d`-component real field.
#[derive(Clone, Debug)]
pub struct RealVectorField {
    grid: Grid,
    values: Vec<Vec<f64>>,
}

impl RealVectorField {
    /// Wraps per-component sample arrays; rejects wrong shapes and non-finite values.
    pub fn new(grid: &Grid, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.len() != grid.dim() {
            return Err(Error::ShapeMismatch {
                expected: grid.dim(),
                got: values.len(),
            });
        }
        for (component, v) in values.iter().enumerate() {
            if v.len() != grid.len() {
                return Err(Error::ShapeMismatch {
                    expected: grid.len(),
                    got: v.len(),
                });
            }
            if let Some(index) = v.iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFinite { component, index });
            }
        }
        Ok(Self {
            grid: grid.clone(),
            values,
        })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![vec![0.0; grid.len()]; grid.dim()],
        }
    }

    /// Samples `f(x)` at every grid point. `f` receives the `d` coordinates
    /// and must return `d` components.
    pub fn from_fn<F>(grid: &Grid, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Vec<f64> + Sync,
    {
        let dim = grid.dim();
        let samples: Vec<Vec<f64>> = (0..grid.len())
            .into_par_iter()
            .map(|flat| {
                let x = grid.point(flat);
                f(&x[..dim])
            })
            .collect();
        let mut values = vec![vec![0.0; grid.len()]; dim];
        for (flat, s) in samples.iter().enumerate() {
            if s.len() != dim {
                return Err(Error::ShapeMismatch {
                    expected: dim,
                    got: s.len(),
                });
            }
            for c in 0..dim {
                values[c][flat] = s[c];
            }
        }
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn component(&self, c: usize) -> &[f64] {
        &self.values[c]
    }

    pub fn into_values(self) -> Vec<Vec<f64>> {
        self.values
    }

    /// Componentwise sup norm; see [`sup_norm`].
    pub fn sup_norm(&self) -> f64 {
        sup_norm(self)
    }

    pub fn to_spectral(&self) -> SpectralVectorField {
        to_spectral(self)
    }
}

/// Fourier coefficients of a real, zero-mean `d`-component field.
#[derive(Clone, Debug)]
pub struct SpectralVectorField {
    grid: Grid,
    coeffs: Vec<Vec<Complex64>>,
}

impl SpectralVectorField {
    /// Wraps coefficient arrays and zeroes the `k = 0` mode.
    ///
    /// Conjugate symmetry is the caller's responsibility; use
    /// [`SpectralVectorField::symmetrize`] when building from raw modes.
    pub fn new(grid: &Grid, mut coeffs: Vec<Vec<Complex64>>) -> Result<Self> {
        if coeffs.len() != grid.dim() {
            return Err(Error::ShapeMismatch {
                expected: grid.dim(),
                got: coeffs.len(),
            });
        }
        for (component, c) in coeffs.iter_mut().enumerate() {
            if c.len() != grid.len() {
                return Err(Error::ShapeMismatch {
                    expected: grid.len(),
                    got: c.len(),
                });
            }
            if let Some(index) = c.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(Error::NonFinite { component, index });
            }
            c[0] = ZERO;
        }
        Ok(Self {
            grid: grid.clone(),
            coeffs,
        })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: vec![vec![ZERO; grid.len()]; grid.dim()],
        }
    }

    /// Exact spectral form of `amplitude · cos(k·x)` in one component, with
    /// `k` given as integer wavenumbers per axis.
    pub fn cosine(grid: &Grid, k: &[i64], component: usize, amplitude: f64) -> Result<Self> {
        let n = grid.n() as i64;
        if k.len() != grid.dim() || component >= grid.dim() {
            return Err(Error::InvalidParameter(format!(
                "wavevector {k:?} / component {component} do not match dimension {}",
                grid.dim()
            )));
        }
        if k.iter().any(|&ki| ki <= -n / 2 || ki >= n / 2) {
            return Err(Error::InvalidParameter(format!("wavevector {k:?} not below Nyquist")));
        }
        let flat = k
            .iter()
            .fold(0usize, |acc, &ki| acc * grid.n() + ki.rem_euclid(n) as usize);
        let mut out = Self::zeros(grid);
        if flat != 0 {
            let partner = grid.partner(flat);
            out.coeffs[component][flat] += Complex64::new(0.5 * amplitude, 0.0);
            out.coeffs[component][partner] += Complex64::new(0.5 * amplitude, 0.0);
        }
        Ok(out)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Vec<Complex64>] {
        &self.coeffs
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        &self.coeffs[c]
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn to_physical(&self) -> RealVectorField {
        to_physical(self)
    }

    /// Replaces every coefficient by the average of itself and the conjugate
    /// of its partner, making the field exactly real.
    pub fn symmetrize(mut self) -> Self {
        let grid = self.grid.clone();
        for comp in &mut self.coeffs {
            let src = comp.clone();
            comp.par_iter_mut().enumerate().for_each(|(flat, z)| {
                let p = grid.partner(flat);
                *z = 0.5 * (src[flat] + src[p].conj());
            });
            comp[0] = ZERO;
        }
        self
    }

    /// Multiplies every component by a real per-mode multiplier.
    pub fn map_multiplier<F>(&self, multiplier: F) -> Self
    where
        F: Fn(usize) -> f64 + Sync,
    {
        let coeffs = self
            .coeffs
            .iter()
            .map(|comp| {
                comp.par_iter()
                    .enumerate()
                    .map(|(flat, &z)| z * multiplier(flat))
                    .collect()
            })
            .collect();
        Self {
            grid: self.grid.clone(),
            coeffs,
        }
    }

    pub fn scale(&self, alpha: f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|comp| comp.iter().map(|&z| z * alpha).collect())
            .collect();
        Self {
            grid: self.grid.clone(),
            coeffs,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// In-place `self += other`.
    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        self.check_same_grid(other)?;
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            a.par_iter_mut().zip(b.par_iter()).for_each(|(x, y)| *x += y);
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, op: impl Fn(Complex64, Complex64) -> Complex64 + Sync) -> Result<Self> {
        self.check_same_grid(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.par_iter().zip(b.par_iter()).map(|(&x, &y)| op(x, y)).collect())
            .collect();
        Ok(Self {
            grid: self.grid.clone(),
            coeffs,
        })
    }

    pub(crate) fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Largest coefficient magnitude over all components.
    pub fn max_abs(&self) -> f64 {
        self.coeffs
            .iter()
            .flat_map(|c| c.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Discrete kinetic energy `½ Σ_k |v̂_k|²`, i.e. half the box-averaged `|v|²`.
    pub fn energy(&self) -> f64 {
        0.5 * self
            .coeffs
            .iter()
            .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum::<f64>()
    }

    /// Spectral divergence `Σ_m iξ_m v̂_m` per mode, with the Nyquist-zeroed
    /// differentiation wavenumbers.
    pub fn divergence(&self) -> Vec<Complex64> {
        let grid = &self.grid;
        let dim = grid.dim();
        (0..grid.len())
            .into_par_iter()
            .map(|flat| {
                let idx = grid.axis_indices(flat);
                let mut acc = ZERO;
                for m in 0..dim {
                    acc += self.coeffs[m][flat] * grid.derivative_wavenumber(idx[m]);
                }
                Complex64::new(-acc.im, acc.re)
            })
            .collect()
    }

    /// `max_k |ξ·v̂(k)| / (max|ξ| · max|v̂|)`; zero for the zero field.
    pub fn divergence_residual(&self) -> f64 {
        let scale = self.grid.max_axis_wavenumber() * (self.grid.dim() as f64).sqrt() * self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        self.divergence().iter().map(|z| z.norm()).fold(0.0, f64::max) / scale
    }

    /// Zeroes every mode with some `|k_i|` above the dealias index limit, and the mean.
    pub fn dealias(&self, fraction: f64) -> Self {
        let grid = self.grid.clone();
        let limit = grid.dealias_index_limit(fraction);
        let n = grid.n();
        let dim = grid.dim();
        let keep: Vec<bool> = (0..n).map(|i| crate::grid::index_to_k(i, n).abs() <= limit).collect();
        let mut out = self.map_multiplier(|flat| {
            let idx = grid.axis_indices(flat);
            if idx[..dim].iter().all(|&i| keep[i]) {
                1.0
            } else {
                0.0
            }
        });
        for c in &mut out.coeffs {
            c[0] = ZERO;
        }
        out
    }

    pub(crate) fn from_parts(grid: &Grid, coeffs: Vec<Vec<Complex64>>) -> Self {
        Self {
            grid: grid.clone(),
            coeffs,
        }
    }
}

/// Forward transform of every component, normalized by `1/n^d`. The mean is
/// discarded so the result satisfies the zero-mean invariant.
pub fn to_spectral(f: &RealVectorField) -> SpectralVectorField {
    let grid = f.grid();
    let coeffs = f
        .values
        .iter()
        .map(|comp| {
            let mut data: Vec<Complex64> = comp.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            fft::transform(grid, &mut data, Direction::Forward);
            data[0] = ZERO;
            data
        })
        .collect();
    SpectralVectorField::from_parts(grid, coeffs)
}

/// Inverse transform of every component; imaginary round-off is dropped.
pub fn to_physical(f: &SpectralVectorField) -> RealVectorField {
    let grid = f.grid();
    let values = f
        .coeffs
        .iter()
        .map(|comp| {
            let mut data = comp.clone();
            fft::transform(grid, &mut data, Direction::Inverse);
            data.into_iter().map(|z| z.re).collect()
        })
        .collect();
    RealVectorField {
        grid: grid.clone(),
        values,
    }
}

/// Partial derivative along `axis`: multiplies by `iξ_axis` with the Nyquist row zeroed.
pub fn gradient_term(f: &SpectralVectorField, axis: usize) -> Result<SpectralVectorField> {
    let grid = f.grid();
    if axis >= grid.dim() {
        return Err(Error::InvalidParameter(format!(
            "axis {axis} out of range for dimension {}",
            grid.dim()
        )));
    }
    let coeffs = f
        .coeffs
        .iter()
        .map(|comp| {
            comp.par_iter()
                .enumerate()
                .map(|(flat, &z)| {
                    let xi = grid.derivative_wavenumber(grid.axis_indices(flat)[axis]);
                    Complex64::new(-z.im * xi, z.re * xi)
                })
                .collect()
        })
        .collect();
    Ok(SpectralVectorField::from_parts(grid, coeffs))
}

/// Leray projection onto divergence-free fields:
/// `v̂(k) ↦ v̂(k) − ξ (ξ·v̂(k)) / |ξ|²`.
///
/// Uses the differentiation wavevector, so the output is divergence-free for
/// the same discrete divergence that [`gradient_term`] defines. Modes whose
/// differentiation wavevector vanishes (the mean and the pure Nyquist corners)
/// pass through unchanged.
pub fn leray_project(f: &SpectralVectorField) -> SpectralVectorField {
    let grid = f.grid();
    let dim = grid.dim();
    let len = grid.len();
    let mut out = vec![vec![ZERO; len]; dim];

    let projected: Vec<[Complex64; 3]> = (0..len)
        .into_par_iter()
        .map(|flat| {
            let idx = grid.axis_indices(flat);
            let mut xi = [0.0; 3];
            let mut xi_sq = 0.0;
            for m in 0..dim {
                xi[m] = grid.derivative_wavenumber(idx[m]);
                xi_sq += xi[m] * xi[m];
            }
            let mut v = [ZERO; 3];
            for m in 0..dim {
                v[m] = f.coeffs[m][flat];
            }
            if xi_sq == 0.0 {
                return v;
            }
            let mut dot = ZERO;
            for m in 0..dim {
                dot += v[m] * xi[m];
            }
            let dot = dot / xi_sq;
            for m in 0..dim {
                v[m] -= dot * xi[m];
            }
            v
        })
        .collect();

    for (flat, v) in projected.into_iter().enumerate() {
        for m in 0..dim {
            out[m][flat] = v[m];
        }
    }
    for c in &mut out {
        c[0] = ZERO;
    }
    SpectralVectorField::from_parts(grid, out)
}

/// Componentwise sup norm over collocation points: `max_{m,x} |f_m(x)|`.
pub fn sup_norm(f: &RealVectorField) -> f64 {
    f.values
        .iter()
        .map(|c| c.par_iter().map(|x| x.abs()).reduce(|| 0.0, f64::max))
        .fold(0.0, f64::max)
}
