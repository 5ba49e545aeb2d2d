//! Integrating-factor RK4 time stepping for the incompressible
//! Navier–Stokes equations with unit viscosity on the periodic box.
//!
//! In spectral variables `∂_t v̂ = −|ξ|² v̂ + N(v̂)` with
//! `N(v) = −Π((v·∇)v)`. The viscous part is integrated exactly through the
//! factors `e^{−|ξ|² h}`; classical RK4 handles `N` in the conjugated
//! variables. Pressure is never formed: the Leray projection `Π` removes it.
//!
//! The step size is fixed. A safe choice for the explicit nonlinear part is
//! `dt ≤ 0.5 / (ξ_max · max|v|)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{leray_project, SpectralVectorField};
use crate::grid::DEFAULT_DEALIAS_FRACTION;
use crate::monitor::{NormSampler, TrajectoryRecord};
use crate::paraproduct::convection_with;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_end: f64,
    pub dealias_fraction: f64,
    /// Record norms every this many steps.
    pub record_every: usize,
    /// Index of the subcritical Besov norm that gets recorded.
    pub gamma: f64,
    /// Turning this off reduces the solver to the heat flow.
    pub nonlinear: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 1.0,
            dealias_fraction: DEFAULT_DEALIAS_FRACTION,
            record_every: 10,
            gamma: 1.5,
            nonlinear: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidParameter(format!("t_end = {} must be >= 0", self.t_end)));
        }
        if !(self.dealias_fraction > 0.0 && self.dealias_fraction <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "dealias_fraction = {} outside (0, 1]",
                self.dealias_fraction
            )));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidParameter("record_every must be >= 1".into()));
        }
        if !(self.gamma > 1.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!("gamma = {} must exceed 1", self.gamma)));
        }
        Ok(())
    }

    /// Number of fixed steps needed to reach `t_end`.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

#[derive(Clone, Debug)]
pub struct SolverState {
    pub t: f64,
    pub v: SpectralVectorField,
    pub step_count: usize,
}

impl SolverState {
    /// Starts at `t = 0` from `v0`, projected and dealiased.
    pub fn new(v0: &SpectralVectorField, dealias_fraction: f64) -> Self {
        Self {
            t: 0.0,
            v: leray_project(&v0.dealias(dealias_fraction)),
            step_count: 0,
        }
    }
}

/// A step produced non-finite coefficients. Carries the last finite state.
#[derive(Clone, Debug)]
pub struct BlowUpSuspected {
    pub last_finite: SolverState,
    /// Time the failed step was aiming for.
    pub t_attempted: f64,
}

impl std::fmt::Display for BlowUpSuspected {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "blow-up suspected: non-finite state at t = {} (last finite t = {}, step {})",
            self.t_attempted, self.last_finite.t, self.last_finite.step_count
        )
    }
}

impl std::error::Error for BlowUpSuspected {}

#[derive(Debug)]
pub enum SimulationError {
    /// The run stopped early; `partial` holds every sample taken so far.
    BlowUp {
        cause: BlowUpSuspected,
        partial: TrajectoryRecord,
    },
    Invalid(Error),
}

impl std::fmt::Display for SimulationError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SimulationError::BlowUp { cause, partial } => {
                write!(f, "{cause}; {} samples recorded", partial.len())
            }
            SimulationError::Invalid(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for SimulationError {}

impl From<Error> for SimulationError {
    fn from(e: Error) -> Self {
        SimulationError::Invalid(e)
    }
}

/// Nonlinear right-hand side `−Π((v·∇)v)`, dealiased and mean-free.
pub fn rhs(v: &SpectralVectorField, dealias_fraction: f64) -> SpectralVectorField {
    leray_project(&convection_with(v, dealias_fraction)).scale(-1.0)
}

/// IF-RK4 stepper with the exponential factors for a fixed `dt` cached.
pub struct Integrator {
    cfg: SolverConfig,
    full: Vec<f64>,
    half: Vec<f64>,
}

impl Integrator {
    pub fn new(grid: &crate::grid::Grid, cfg: &SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let xi_sq = grid.xi_squared();
        let full = xi_sq.par_iter().map(|k2| (-k2 * cfg.dt).exp()).collect();
        let half = xi_sq.par_iter().map(|k2| (-k2 * 0.5 * cfg.dt).exp()).collect();
        Ok(Self {
            cfg: cfg.clone(),
            full,
            half,
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    fn nonlinear(&self, v: &SpectralVectorField) -> SpectralVectorField {
        if self.cfg.nonlinear {
            rhs(v, self.cfg.dealias_fraction)
        } else {
            SpectralVectorField::zeros(v.grid())
        }
    }

    pub fn step(&self, s: &SolverState) -> std::result::Result<SolverState, BlowUpSuspected> {
        let h = self.cfg.dt;
        let v = &s.v;
        let full = |f: &SpectralVectorField| f.map_multiplier(|i| self.full[i]);
        let half = |f: &SpectralVectorField| f.map_multiplier(|i| self.half[i]);
        let sum = |a: &SpectralVectorField, b: &SpectralVectorField| a.add(b).expect("same grid");

        let k1 = self.nonlinear(v);
        let k2 = self.nonlinear(&half(&sum(v, &k1.scale(0.5 * h))));
        let v_half = half(v);
        let k3 = self.nonlinear(&sum(&v_half, &k2.scale(0.5 * h)));
        let k4 = self.nonlinear(&sum(&full(v), &half(&k3).scale(h)));

        let mut incr = full(&k1);
        incr.add_assign(&half(&sum(&k2, &k3)).scale(2.0)).expect("same grid");
        incr.add_assign(&k4).expect("same grid");
        let next = sum(&full(v), &incr.scale(h / 6.0));
        let next = leray_project(&next.dealias(self.cfg.dealias_fraction));

        let step_count = s.step_count + 1;
        let t = s.t + h;
        if !next
            .coeffs()
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
        {
            return Err(BlowUpSuspected {
                last_finite: s.clone(),
                t_attempted: t,
            });
        }
        Ok(SolverState { t, v: next, step_count })
    }
}

#[derive(Debug)]
pub enum StepError {
    BlowUp(BlowUpSuspected),
    Invalid(Error),
}

impl std::fmt::Display for StepError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StepError::BlowUp(b) => write!(f, "{b}"),
            StepError::Invalid(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for StepError {}

/// Advances `s` by one step of `cfg.dt`.
///
/// Builds a fresh [`Integrator`]; loops should hold one instead.
pub fn step(s: &SolverState, cfg: &SolverConfig) -> std::result::Result<SolverState, StepError> {
    let integrator = Integrator::new(s.v.grid(), cfg).map_err(StepError::Invalid)?;
    integrator.step(s).map_err(StepError::BlowUp)
}

/// Integrates from `v0` to `cfg.t_end`, sampling norms at `t = 0`, every
/// `record_every` steps and at the final step. `monitor` sees each sampled state.
pub fn simulate<F>(
    v0: &SpectralVectorField,
    cfg: &SolverConfig,
    sampler: &NormSampler,
    mut monitor: F,
) -> std::result::Result<TrajectoryRecord, SimulationError>
where
    F: FnMut(&SolverState),
{
    let integrator = Integrator::new(v0.grid(), cfg)?;
    let mut state = SolverState::new(v0, cfg.dealias_fraction);
    let mut record = TrajectoryRecord::new(sampler.gamma(), *sampler.range());
    record.push(sampler.sample(state.t, &state.v));
    monitor(&state);

    let steps = cfg.steps();
    for k in 1..=steps {
        match integrator.step(&state) {
            Ok(mut next) => {
                // avoid accumulating round-off in t
                next.t = k as f64 * cfg.dt;
                state = next;
            }
            Err(cause) => {
                record.terminated_early = true;
                return Err(SimulationError::BlowUp { cause, partial: record });
            }
        }
        if k % cfg.record_every == 0 || k == steps {
            record.push(sampler.sample(state.t, &state.v));
            monitor(&state);
        }
    }
    Ok(record)
}
