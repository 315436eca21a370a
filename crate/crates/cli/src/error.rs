use std::path::{Path, PathBuf};

use circrisk::RiskError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("validation failed: {0}")]
    Validation(String),
    /// Engine invariant violations; configuration and usage errors map to
    /// `Config`.
    #[error(transparent)]
    Risk(RiskError),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) | Self::Risk(_) => 1,
            Self::Config(_) => 2,
            Self::Io { .. } => 3,
        }
    }
}

impl From<RiskError> for CliError {
    fn from(e: RiskError) -> Self {
        match e {
            RiskError::Config(msg) | RiskError::Usage(msg) => Self::Config(msg),
            other => Self::Risk(other),
        }
    }
}
