use thiserror::Error;

/// Errors raised by the algebraic kernels.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero: degenerate denominator")]
    DivisionByZero,
    #[error("unsupported exponent: {0}")]
    UnsupportedExponent(String),
    #[error("product does not exist: {0}")]
    ProductExistence(String),
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("no rational candidate within bounds: {0}")]
    NoCandidate(String),
    #[error("cutoff exceeded: weight {weight} above cutoff {cutoff}")]
    CutoffExceeded { weight: String, cutoff: String },
    #[error("grading violation: {0}")]
    GradingViolation(String),
    #[error("inconsistent certificate: {0}")]
    InconsistentCertificate(String),
    #[error("lattice violation: {0}")]
    LatticeViolation(String),
    #[error("incompatible denominator bound: {0}")]
    IncompatibleD(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
