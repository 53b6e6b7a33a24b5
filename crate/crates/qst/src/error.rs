use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read config {path}: {source}")]
    ConfigRead {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot parse config {path}: {message}")]
    ConfigParse { path: PathBuf, message: String },

    #[error("invalid config:\n  - {}", .0.join("\n  - "))]
    Invalid(Vec<String>),

    #[error("simulation failed (v = {v}): {source}")]
    Simulation { v: f64, source: qst_core::Error },

    #[error("runtime invariant breached: {0}")]
    Invariant(String),

    #[error("output validation failed for {path}: {message}")]
    OutputValidation { path: PathBuf, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot serialize summary: {0}")]
    Json(#[from] serde_json::Error),

    #[error("cannot build worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl Error {
    /// Process exit code: 2 for configuration problems, 3 for runtime
    /// invariant breaches, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ConfigRead { .. } | Error::ConfigParse { .. } | Error::Invalid(_) => 2,
            Error::Simulation { .. } | Error::Invariant(_) | Error::OutputValidation { .. } => 3,
            Error::Io { .. } | Error::Json(_) | Error::Pool(_) => 1,
        }
    }
}
