use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },

    #[error("parity violation: {0}")]
    Parity(String),

    #[error("site {site} out of range for {n_qubits} qubits")]
    OutOfRange { site: usize, n_qubits: usize },

    #[error("operator is not Hermitian: {0}")]
    NotHermitian(String),

    #[error("size cap exceeded: {what} supports at most {max} qubits, got {got}")]
    SizeCap { what: &'static str, max: usize, got: usize },

    #[error("term {0} is discarded under open boundary conditions")]
    DiscardedTerm(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("ambiguous kernel: smallest retained {kept:e} vs first rejected {rejected:e} (tol {tol:e})")]
    AmbiguousKernel { kept: f64, rejected: f64, tol: f64 },

    #[error("threshold {eta} not reached within {steps} steps (last value {last})")]
    NotReached { eta: f64, steps: u64, last: f64 },

    #[error("ill-conditioned ratio: denominator {mean:e} within 2 sigma ({stderr:e}) of zero")]
    IllConditioned { mean: f64, stderr: f64 },

    #[error("no decay detected: {0}")]
    NoDecay(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
