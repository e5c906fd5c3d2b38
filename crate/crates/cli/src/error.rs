use std::path::{Path, PathBuf};

use periods_core::Error;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Core(#[from] Error),

    #[error("suite failure: {0}")]
    SuiteFailure(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    /// 2 config or file, 3 numeric or failed suite, 4 resource limit, 5 degenerate statistics.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::SuiteFailure(_) => 3,
            CliError::Core(e) => match e {
                Error::InvalidInput(_) | Error::InvalidConfig(_) => 2,
                Error::ResourceLimit(_) => 4,
                Error::Degenerate(_) => 5,
                _ => 3,
            },
        }
    }
}
