use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported algebra: {0}")]
    Unsupported(String),

    #[error("normalization self-check failed: {0}")]
    Normalization(String),

    #[error("parent mismatch: {0}")]
    ParentMismatch(String),

    #[error("pairing `{pairing}` is unavailable for {algebra}")]
    PairingUnavailable { pairing: String, algebra: String },

    #[error("matrix is not in {algebra} (basis residual {residual:.3e})")]
    NotInAlgebra { algebra: String, residual: f64 },

    #[error("invalid group element ({group}): {reason}")]
    InvalidGroupElement { group: String, reason: String },

    #[error("{function}: argument {arg} lies within {distance:.3e} of the pole at {pole}")]
    PoleProximity {
        function: String,
        arg: Complex64,
        pole: Complex64,
        distance: f64,
    },

    #[error("principal logarithm undefined: eigenvalue {0} on the closed negative real axis")]
    BranchCut(Complex64),

    #[error("series fallback failed: {0}")]
    Fallback(String),

    #[error("Gauss factorization failed: trailing principal minor of order {order} vanishes")]
    NotFactorizable { order: usize },

    #[error("derivative routes disagree by {0:.3e}")]
    RouteDisagreement(f64),

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
