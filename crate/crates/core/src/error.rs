use thiserror::Error;

/// Errors raised by the simulation and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("spin quantum number {0} is not a non-negative half-integer")]
    InvalidSpin(f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("operator is not hermitian (max |A - A^dagger| = {0:e})")]
    NotHermitian(f64),

    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("cat size J(1 - cos theta) vanishes at theta = 0")]
    ZeroCatSize,

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("data has no peak")]
    NoPeak,

    #[error("contrast {0:e} is too small to define a fringe phase")]
    ZeroContrast(f64),

    #[error("drift estimate and contrast estimate would use the same shots")]
    SplitNotIndependent,

    #[error("no local maximum inside the search bracket [{lo:e}, {hi:e}]")]
    NoLocalMaximum { lo: f64, hi: f64 },

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("calibration target not bracketed: {0}")]
    NotBracketed(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonPositive { name, value })
    }
}
