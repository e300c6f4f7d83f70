use std::path::PathBuf;

use breitham_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("{0}")]
    Numerical(CoreError),
    #[error("{0}")]
    Bracket(CoreError),
    #[error("{0}")]
    Invalid(CoreError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 usage/config, 3 numerical failure, 4 bracketing failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_)
            | CliError::Parse { .. }
            | CliError::Invalid(_)
            | CliError::Io { .. } => 2,
            CliError::Numerical(_) => 3,
            CliError::Bracket(_) => 4,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        use CoreError::*;
        match e {
            NoBracket { .. } => CliError::Bracket(e),
            NoConvergence { .. }
            | NonFiniteEntry { .. }
            | Unnormalized { .. }
            | StateOutsideBasis
            | InsufficientPoints { .. } => CliError::Numerical(e),
            _ => CliError::Invalid(e),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
