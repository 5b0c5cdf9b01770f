use std::path::{Path, PathBuf};

use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] regwatch::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("output directory {0} is locked by another writer")]
    Locked(PathBuf),
    #[error("checksum mismatch for {0}")]
    Checksum(PathBuf),
    #[error("{0}")]
    Input(String),
    #[error("{failed} of {total} checks failed")]
    ChecksFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    /// Process exit status for this failure.
    pub fn exit_code(&self) -> u8 {
        use regwatch::Error as E;
        match self {
            CliError::ChecksFailed { .. } => 1,
            CliError::Config(_) => 2,
            CliError::Core(e) => match e {
                E::Cfl { .. } | E::Instability { .. } => 3,
                E::Io(_) | E::Format(_) => 4,
                E::TooSparse(_) => 5,
                _ => 2,
            },
            CliError::Io { .. } | CliError::Locked(_) | CliError::Checksum(_) | CliError::Input(_) => 4,
        }
    }
}
