use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Model(#[from] nnoma_core::Error),

    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },

    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },

    #[error("line {line}: key `{key}` given twice")]
    DuplicateKey { line: usize, key: String },

    #[error("key `{key}`: cannot parse `{value}` ({reason})")]
    BadValue { key: String, value: String, reason: String },

    #[error("sweep: {0}")]
    Sweep(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("nothing to emit")]
    Empty,
}

impl HarnessError {
    /// Short stable name used in the machine-readable error line.
    pub fn kind(&self) -> &'static str {
        match self {
            HarnessError::Model(_) => "model",
            HarnessError::Syntax { .. } => "syntax",
            HarnessError::UnknownKey { .. } => "unknown_key",
            HarnessError::DuplicateKey { .. } => "duplicate_key",
            HarnessError::BadValue { .. } => "bad_value",
            HarnessError::Sweep(_) => "sweep",
            HarnessError::Io { .. } => "io",
            HarnessError::Csv(_) => "csv",
            HarnessError::Json(_) => "json",
            HarnessError::Empty => "empty",
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
