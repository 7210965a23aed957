use std::path::{Path, PathBuf};

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] repdet_core::Error),

    #[error("{path}: {source}")]
    Path { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("invalid argument: {0}")]
    Arg(String),
}

impl Error {
    pub(crate) fn path(path: &Path, source: std::io::Error) -> Self {
        Error::Path { path: path.to_path_buf(), source }
    }
}
