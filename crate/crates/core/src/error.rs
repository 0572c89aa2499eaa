use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the numerics, stability, model and simulation layers.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("root finder did not converge after {iterations} iterations (max update {max_update:e})")]
    NoConvergence {
        iterations: usize,
        max_update: f64,
        best: Vec<Complex64>,
    },

    #[error("singular matrix {what} (condition estimate {condition:e})")]
    Singular { what: String, condition: f64 },

    #[error("singularity: {0}")]
    Singularity(String),

    #[error("inconsistent decomposition: {0}")]
    Inconsistent(String),

    #[error("invalid configuration: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
