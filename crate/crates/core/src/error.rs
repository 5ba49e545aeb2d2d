use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: operands live on different grids")]
    GridMismatch,

    #[error("shape mismatch: expected {expected} values, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("non-finite value in field component {component} at index {index}")]
    NonFinite { component: usize, index: usize },

    #[error("band {j} is not resolvable on this grid (resolvable bands {j_min}..={j_max})")]
    UnresolvableBand { j: i32, j_min: i32, j_max: i32 },

    #[error("no dyadic band fits on this grid below the dealias cutoff {cutoff}")]
    EmptyBandRange { cutoff: f64 },

    #[error("band {j} carries no energy")]
    ZeroBand { j: i32 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("inconsistent result: {0}")]
    Inconsistent(String),

    #[error("window [{0}, {1}] contains no recorded samples")]
    EmptyWindow(f64, f64),

    #[error("malformed checkpoint: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
