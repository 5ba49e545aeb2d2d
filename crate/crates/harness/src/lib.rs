//! Reproducible experiment driver for the `lpns` laboratory.
//!
//! Experiments are described by a JSON [`config::ExperimentConfig`], seeded
//! through a counter-based generator ([`rng`]) and write CSV/JSON outputs
//! whose every row carries the member seed and the config hash. The
//! `lpns-lab` binary wraps [`experiments::run_experiment`],
//! [`inspect::inspect_checkpoint`] and [`fit::fit_constants`].

pub mod config;
mod error;
pub mod experiments;
pub mod fit;
pub mod inspect;
pub mod random;
pub mod rng;

pub use error::HarnessError;

/// Sizes the global rayon pool from `LPNS_WORKERS` when set.
pub fn init_workers() -> Result<(), HarnessError> {
    let Ok(raw) = std::env::var("LPNS_WORKERS") else {
        return Ok(());
    };
    let workers: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&w| w > 0)
        .ok_or_else(|| HarnessError::Config(format!("LPNS_WORKERS = `{raw}` is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .map_err(|e| HarnessError::Config(e.to_string()))
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/harness.md")]
    pub mod harness {}
}
