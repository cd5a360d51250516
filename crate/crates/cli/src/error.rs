use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] kernsel::Error),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        CliError::Data(msg.into())
    }

    /// 2 for configuration problems, 3 for bad data, 1 for output failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Output { .. } => 1,
            CliError::Core(e) => match e {
                kernsel::Error::Config(_)
                | kernsel::Error::RuleUnavailable { .. }
                | kernsel::Error::UnsupportedDensity(_) => 2,
                kernsel::Error::Data(_)
                | kernsel::Error::Domain { .. }
                | kernsel::Error::Quadrature { .. } => 3,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
