use polaron_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("numerical error: {0}")]
    Numerical(#[source] CoreError),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{0} bound check(s) failed")]
    BoundsFailed(usize),
}

impl CliError {
    /// Core errors raised while validating input are configuration errors.
    pub fn invalid(e: CoreError) -> Self {
        CliError::Config(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
            CliError::BoundsFailed(_) => 1,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidParameter { .. } | CoreError::DimensionCap { .. } => CliError::invalid(e),
            CoreError::Io(io) => CliError::Io(io),
            other => CliError::Numerical(other),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}
