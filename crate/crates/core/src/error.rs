use thiserror::Error;

/// Errors produced by the engine.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or input violates its documented domain.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A characteristic function or transform was evaluated outside its
    /// analyticity strip, or hit a vanishing denominator.
    #[error("domain error: {0}")]
    Domain(String),

    /// Numerical failure (singular system, non-finite result, non-convergence).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Mismatch between an option contract and the simulated grid.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// Malformed CSV or config input.
    #[error("parse error in {path} at line {line}: {reason}")]
    Parse {
        path: String,
        line: u64,
        reason: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and > 0, got {value}")))
    }
}
