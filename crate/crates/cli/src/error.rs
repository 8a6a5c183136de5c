use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("cannot read config {path}: {source}")]
    ReadConfig {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Invalid input detected by the numerical core (domain, argument).
    #[error(transparent)]
    Input(curlforce_core::Error),

    /// The numerics failed; outputs written so far are kept.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    /// 1 for usage and configuration problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => 2,
            _ => 1,
        }
    }
}

impl From<curlforce_core::Error> for CliError {
    fn from(e: curlforce_core::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Input(e)
        }
    }
}
