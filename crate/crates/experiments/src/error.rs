use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid sweep spec: {0}")]
    Spec(String),
    #[error("unknown figure preset '{0}' (expected one of: {1})")]
    UnknownPreset(String, String),
    #[error("cannot read config {path}: {source}")]
    ConfigRead {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse config: {0}")]
    ConfigParse(#[from] serde_json::Error),
    #[error(transparent)]
    Engine(#[from] su11_core::Error),
    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit status: 1 for usage and configuration problems, 2 for
    /// engine or output failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Spec(_)
            | Error::UnknownPreset(..)
            | Error::ConfigRead { .. }
            | Error::ConfigParse(_) => 1,
            Error::Engine(_) | Error::Io(_) | Error::Csv(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
