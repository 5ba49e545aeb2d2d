//! Littlewood–Paley calculus and a pseudo-spectral Navier–Stokes laboratory
//! on the periodic box.
//!
//! The crate provides:
//!
//! * [`grid`] and [`field`]: periodic grids, FFT transforms, spectral
//!   differentiation and the Leray projection;
//! * [`littlewood_paley`]: dyadic band projections and `Ḃ^s_{∞,∞}` norms;
//! * [`paraproduct`]: the convection term, its Bony split and the product
//!   estimate check;
//! * [`heat`]: the heat semigroup and per-band decay fits;
//! * [`solver`]: integrating-factor RK4 time stepping;
//! * [`monitor`]: norm trajectories, the a-priori bound audit and the
//!   critical-norm smallness criterion;
//! * [`checkpoint`]: the binary `LPNS` field format.
//!
//! ```
//! use lpns::prelude::*;
//! use std::f64::consts::PI;
//!
//! let grid = make_grid(3, 32, 2.0 * PI)?;
//! let cutoff = make_cutoff();
//! let range = band_range(&grid, &cutoff, grid.dealias_cutoff(DEFAULT_DEALIAS_FRACTION))?;
//!
//! // A single Fourier mode at |ξ| = 8 sits entirely in band 3.
//! let v = RealVectorField::from_fn(&grid, |x| vec![0.0, 0.5 * (8.0 * x[0]).cos(), 0.0])?
//!     .to_spectral();
//! let critical = critical_norm(&v, &cutoff, &range)?;
//! assert!((critical - 0.5 / 8.0).abs() < 1e-14);
//! # Ok::<(), lpns::Error>(())
//! ```

pub mod checkpoint;
mod error;
mod fft;
pub mod field;
pub mod grid;
pub mod heat;
pub mod littlewood_paley;
pub mod monitor;
pub mod paraproduct;
pub mod solver;

pub use error::{Error, Result};
pub use rustfft::num_complex::Complex64;

pub mod prelude {
    pub use crate::field::{
        gradient_term, leray_project, sup_norm, to_physical, to_spectral, RealVectorField, SpectralVectorField,
    };
    pub use crate::grid::{make_grid, Grid, DEFAULT_DEALIAS_FRACTION};
    pub use crate::heat::{band_decay_check, heat_apply, DecayFit};
    pub use crate::littlewood_paley::{
        band_range, besov_norm, make_cutoff, project_band, project_low, BandIndexRange, CutoffProfile,
    };
    pub use crate::monitor::{
        check_theorem1, critical_norm, duhamel_band_audit, lemma2_audit, MonitorReport, NormSampler, TrajectoryRecord,
        Verdict, DEFAULT_GAMMA,
    };
    pub use crate::paraproduct::{bony_split, convection, lemma1_check, lemma1_scan, BonySplit, Lemma1Report};
    pub use crate::solver::{rhs, simulate, step, Integrator, SimulationError, SolverConfig, SolverState};
    pub use crate::Error;
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/grid-and-transforms.md")]
    pub mod grid_and_transforms {}
    #[doc = include_str!("../../../book/src/littlewood-paley.md")]
    pub mod littlewood_paley {}
    #[doc = include_str!("../../../book/src/paraproduct.md")]
    pub mod paraproduct {}
    #[doc = include_str!("../../../book/src/heat-flow.md")]
    pub mod heat_flow {}
    #[doc = include_str!("../../../book/src/solver.md")]
    pub mod solver {}
    #[doc = include_str!("../../../book/src/regularity-monitor.md")]
    pub mod regularity_monitor {}
}
