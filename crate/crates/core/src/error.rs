use thiserror::Error;

/// Errors raised by the validation pipeline and its building blocks.
///
/// Numeric diagnostics are carried as `f64` regardless of the scalar type
/// the computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    #[error("division by an interval containing zero")]
    DivisionByZero,
    #[error("square root of an interval with negative lower bound {lo}")]
    NegativeSqrt { lo: f64 },
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("unsupported spatial dimension {0} (expected 1, 2 or 3)")]
    UnsupportedDimension(usize),
    #[error("series has a nonzero mean coefficient")]
    NonzeroMean,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("matrix is numerically singular")]
    SingularMatrix,
    #[error("finite inverse not certified: ||C B - I|| <= {residual_norm} is not below 1 (size {size})")]
    FiniteInverseNotCertified { residual_norm: f64, size: usize },
    #[error("Neumann bound tau = {tau} >= 1 at N = {n}; increase N (suggested N = {suggested_n})")]
    TauTooLarge { tau: f64, n: usize, suggested_n: usize },
    #[error("Newton iteration failed after {iterations} steps (residual {residual})")]
    NewtonDiverged { iterations: usize, residual: f64 },
    #[error("certificate precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T, E = CoreError> = std::result::Result<T, E>;
