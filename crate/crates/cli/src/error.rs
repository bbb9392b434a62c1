use scarot_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 parse error, 3 unsupported stratum or dimension, 4 no convergence,
    /// 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Core(
                CoreError::UnsupportedStratum(_)
                | CoreError::UnsupportedDimension { .. }
                | CoreError::DimensionTooLarge { .. },
            ) => 3,
            CliError::NoConvergence(_) => 4,
            _ => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
