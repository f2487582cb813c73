use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NonHermitian(f64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),
    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),
    #[error("trace is {0}, expected 1")]
    InvalidTrace(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("alpha = {0} outside (1, 2]")]
    AlphaOutOfRange(f64),
    #[error("epsilon = {0} outside the admissible range")]
    EpsOutOfRange(f64),
    #[error("state is pure; bound is infinite")]
    PureInput,
    #[error("energy gap {0} is not an integer multiple of 2π/τ")]
    IncommensurateSpectrum(f64),
    #[error("period mismatch: {0}")]
    PeriodMismatch(String),
    #[error("support gcd is {0}, not 1")]
    GcdNotOne(i64),
    #[error("no overlapping copy count found up to {0}")]
    SearchExhausted(usize),
    #[error("distribution has zero variance")]
    ZeroVariance,
    #[error("distribution does not overlap its own shift")]
    ZeroNu,
    #[error("target state has zero energy variance")]
    ZeroTargetVariance,
    #[error("target state has zero quantum Fisher information")]
    ZeroTargetQfi,
    #[error("SDP stalled after {iterations} iterations with gap {gap:.3e}")]
    SolverStall { gap: f64, iterations: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimMismatch { expected, found })
    }
}
