use thiserror::Error;

/// Errors shared by every numerical routine in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("argument {0} is outside the supported range")]
    OutOfRange(f64),
    #[error("pole or near-pole argument: {0}")]
    Pole(String),
    #[error("matrix is numerically singular")]
    Singular,
    #[error("convergence certificate failed for {what}: difference {diff:.3e} exceeds {tol:.1e}")]
    Certificate { what: String, diff: f64, tol: f64 },
    #[error("solution blew up at x = {0}")]
    BlowUp(f64),
    #[error("resource bound exceeded: {0}")]
    Resource(String),
    #[error("kernel evaluation failed at node {index}: {reason}")]
    Kernel { index: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
