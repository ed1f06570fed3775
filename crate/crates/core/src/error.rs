use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid single-site dimension {0} (need ell >= 2)")]
    InvalidDimension(usize),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("coordinates lie outside the state body: {0}")]
    OutOfBody(String),

    #[error("dimension mismatch: expected {expected} variables, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("polynomial parse error at column {column}: {message}")]
    Parse { column: usize, message: String },

    #[error("size budget exceeded: {0}")]
    Budget(String),

    #[error("unsupported backend: {0}")]
    UnsupportedBackend(String),

    #[error("invalid spin sector: N = {n}, 2j = {two_j}")]
    InvalidSector { n: usize, two_j: usize },

    #[error("majorant table too short: requested order {requested}, table holds {available}")]
    ExtendTable { requested: usize, available: usize },

    #[error("outside the certified convergence domain: 2*M*alpha = {scaled} >= delta_est = {delta}")]
    OutsideConvergence { scaled: f64, delta: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
