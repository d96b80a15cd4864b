use thiserror::Error;

/// Errors raised while building kernels, problems or linear-algebra objects.
///
/// Integrator failures (step underflow, Newton failure, step limit) are not
/// errors: they are reported through [`crate::radau::Status`] so that the
/// partial trajectory survives.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("alpha must lie in (0,1), got {0}; use the solver's split for alpha>1")]
    KernelOrder(f64),
    #[error("eps must lie in (0,1), got {0}")]
    Accuracy(f64),
    #[error("eps={eps} is too large for alpha={alpha}: {reason}")]
    AccuracyTooLarge { alpha: f64, eps: f64, reason: &'static str },
    #[error("t_end={t_end} must exceed the kernel validity bound delta={delta}")]
    HorizonTooShort { t_end: f64, delta: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: {what} has length {got}, expected {expected}")]
    Dimension { what: &'static str, got: usize, expected: usize },
    #[error("integer integral order {0} is not supported; write the polynomial kernel as ODEs")]
    IntegerOrder(f64),
    #[error("inconsistent initial values: algebraic row {row} has residual {residual:e}")]
    Inconsistent { row: usize, residual: f64 },
    #[error("matrix is singular at pivot {pivot}")]
    Singular { pivot: usize },
    #[error("linear algebra mode {mode} cannot be used here: {reason}")]
    IncompatibleMode { mode: &'static str, reason: &'static str },
    #[error("dense materialization of dimension {dim} exceeds the cap {cap}")]
    TooLarge { dim: usize, cap: usize },
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
