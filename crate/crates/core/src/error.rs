use thiserror::Error;

/// Errors raised by the grid, state, and verification routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChurError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("shift {shift} exceeds the admissible limit {limit} (quarter of the window)")]
    ShiftTooLarge { shift: f64, limit: f64 },

    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),

    #[error("amplitude count {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("states live on different grids")]
    GridMismatch,

    #[error("invalid mixture: {0}")]
    InvalidMixture(String),

    #[error("grid too small: {0}")]
    GridTooSmall(String),

    #[error("comb teeth unresolved: tooth sigma {tooth_sigma} must exceed 2·dx = {limit}")]
    TeethUnresolved { tooth_sigma: f64, limit: f64 },

    #[error("variance below 1e-12 in the {0} representation")]
    ZeroVariance(&'static str),

    #[error("mask domain overflow: {0}")]
    DomainOverflow(String),

    #[error("mask is not square integrable")]
    NonIntegrableMask,

    #[error("invalid mask: {0}")]
    InvalidMask(String),

    #[error("shot count must be positive")]
    InvalidShots,

    #[error("matrix is not unitary (defect {0:e})")]
    NotUnitary(f64),

    #[error("vector is not a unit vector (norm² = {0})")]
    NotUnitVector(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for ChurError {
    fn from(e: std::io::Error) -> Self {
        ChurError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, ChurError>;
