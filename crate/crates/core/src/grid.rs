//! Periodic box descriptor and its wavenumber lattice.
//!
//! Arrays on a grid are stored row-major (last axis fastest) in FFT order:
//! storage index `i` on an axis carries the integer wavenumber `k = i` for
//! `i < n/2` and `k = i - n` otherwise, so `k` ranges over `[-n/2, n/2)`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Default 2/3-rule dealias fraction.
pub const DEFAULT_DEALIAS_FRACTION: f64 = 2.0 / 3.0;

/// Periodic box `[0, period)^d` sampled with `n` points per axis.
///
/// Cloning is cheap: the lattice tables and FFT plans are shared.
#[derive(Clone)]
pub struct Grid {
    inner: Arc<GridInner>,
}

struct GridInner {
    dim: usize,
    n: usize,
    period: f64,
    len: usize,
    /// Wavenumber `2πk/period` per storage index along one axis.
    xi: Vec<f64>,
    /// Same as `xi` with the Nyquist entry zeroed; used for differentiation.
    xi_deriv: Vec<f64>,
    /// `|ξ|²` per flat index.
    xi_sq: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Grid {
    /// Builds a grid; `dim` must be 2 or 3 and `n` a power of two no smaller than 8.
    pub fn new(dim: usize, n: usize, period: f64) -> Result<Self> {
        if !(dim == 2 || dim == 3) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in {{2, 3}}")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "{n} points per axis: need a power of two >= 8"
            )));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidGrid(format!("period {period} must be positive")));
        }

        let scale = 2.0 * PI / period;
        let xi: Vec<f64> = (0..n).map(|i| index_to_k(i, n) as f64 * scale).collect();
        let mut xi_deriv = xi.clone();
        xi_deriv[n / 2] = 0.0;

        let len = n.pow(dim as u32);
        let mut xi_sq = vec![0.0; len];
        for (flat, slot) in xi_sq.iter_mut().enumerate() {
            let idx = unflatten(flat, dim, n);
            *slot = idx[..dim].iter().map(|&i| xi[i] * xi[i]).sum();
        }

        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);

        Ok(Self {
            inner: Arc::new(GridInner {
                dim,
                n,
                period,
                len,
                xi,
                xi_deriv,
                xi_sq,
                forward,
                inverse,
            }),
        })
    }

    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    /// Points per axis.
    pub fn n(&self) -> usize {
        self.inner.n
    }

    pub fn period(&self) -> f64 {
        self.inner.period
    }

    /// Total number of points (`n^d`).
    pub fn len(&self) -> usize {
        self.inner.len
    }

    pub fn is_empty(&self) -> bool {
        self.inner.len == 0
    }

    /// Grid spacing `period / n`.
    pub fn spacing(&self) -> f64 {
        self.inner.period / self.inner.n as f64
    }

    /// Integer wavenumbers along one axis, in storage order.
    pub fn integer_wavenumbers(&self) -> Vec<i64> {
        (0..self.n()).map(|i| index_to_k(i, self.n())).collect()
    }

    /// Physical wavenumber `2πk/period` for storage index `i` on any axis.
    pub fn wavenumber(&self, i: usize) -> f64 {
        self.inner.xi[i]
    }

    /// Differentiation wavenumber: as [`Grid::wavenumber`] but zero on the Nyquist row.
    pub fn derivative_wavenumber(&self, i: usize) -> f64 {
        self.inner.xi_deriv[i]
    }

    /// `|ξ|²` for every flat index.
    pub fn xi_squared(&self) -> &[f64] {
        &self.inner.xi_sq
    }

    /// Euclidean modulus of the wavevector at a flat index.
    pub fn modulus(&self, flat: usize) -> f64 {
        self.inner.xi_sq[flat].sqrt()
    }

    /// Largest per-axis wavenumber magnitude, `(n/2)·2π/period`.
    pub fn max_axis_wavenumber(&self) -> f64 {
        (self.n() / 2) as f64 * 2.0 * PI / self.period()
    }

    /// Smallest nonzero lattice modulus, `2π/period`.
    pub fn min_modulus(&self) -> f64 {
        2.0 * PI / self.period()
    }

    /// Radius of the dealiased ball for a given fraction of the Nyquist wavenumber.
    pub fn dealias_cutoff(&self, fraction: f64) -> f64 {
        fraction * self.max_axis_wavenumber()
    }

    /// Largest retained integer wavenumber per axis under the dealias rule.
    pub fn dealias_index_limit(&self, fraction: f64) -> i64 {
        (fraction * (self.n() / 2) as f64 + 1e-9).floor() as i64
    }

    /// Per-axis storage indices of a flat index; unused trailing entries are 0.
    pub fn axis_indices(&self, flat: usize) -> [usize; 3] {
        unflatten(flat, self.dim(), self.n())
    }

    /// Flat index of the mode `-k` (the conjugate partner of `k`).
    pub fn partner(&self, flat: usize) -> usize {
        let n = self.n();
        let idx = self.axis_indices(flat);
        idx[..self.dim()].iter().fold(0, |acc, &i| acc * n + (n - i) % n)
    }

    /// Physical coordinates of a flat index.
    pub fn point(&self, flat: usize) -> [f64; 3] {
        let h = self.spacing();
        let idx = self.axis_indices(flat);
        let mut x = [0.0; 3];
        for a in 0..self.dim() {
            x[a] = idx[a] as f64 * h;
        }
        x
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self == other
    }

    pub(crate) fn plans(&self) -> (&Arc<dyn Fft<f64>>, &Arc<dyn Fft<f64>>) {
        (&self.inner.forward, &self.inner.inverse)
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.dim() == other.dim() && self.n() == other.n() && self.period().to_bits() == other.period().to_bits()
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("dim", &self.dim())
            .field("n", &self.n())
            .field("period", &self.period())
            .finish()
    }
}

/// Builds a [`Grid`]; see [`Grid::new`].
pub fn make_grid(dim: usize, n: usize, period: f64) -> Result<Grid> {
    Grid::new(dim, n, period)
}

#[inline]
pub(crate) fn index_to_k(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

#[inline]
fn unflatten(flat: usize, dim: usize, n: usize) -> [usize; 3] {
    match dim {
        2 => [flat / n, flat % n, 0],
        _ => [flat / (n * n), (flat / n) % n, flat % n],
    }
}
