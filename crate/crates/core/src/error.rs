use thiserror::Error;

/// Errors raised anywhere in the lab.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("lattice mismatch: expected {expected}, found {found}")]
    LatticeMismatch { expected: String, found: String },

    #[error("quadrature did not converge: estimate {value:.12e}, error estimate {error:.3e}")]
    Quadrature { value: f64, error: f64 },

    #[error("basis dimension {estimate} exceeds cap {cap}")]
    DimensionCap { estimate: u128, cap: usize },

    #[error("operator is not hermitian (max asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("truncation leakage {leakage:.3e} exceeds tolerance {tolerance:.3e}")]
    Leakage { leakage: f64, tolerance: f64 },

    #[error("integrator aborted at t = {t}: {reason}")]
    IntegratorAbort { t: f64, reason: String },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:.3e})")]
    EigenSolver { iterations: usize, residual: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
