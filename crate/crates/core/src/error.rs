use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the divergence kernels, solvers, and data loaders.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("invalid rank {rank}: must satisfy 1 <= K <= min(F, N) = {max}")]
    InvalidRank { rank: usize, max: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("non-finite objective: {0}")]
    NonFiniteObjective(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: u64,
        column: usize,
        message: String,
    },

    #[error("ragged input at row {row}: expected {expected} fields, found {found}")]
    Ragged {
        row: u64,
        expected: usize,
        found: usize,
    },

    #[error("wrong column count at row {row}: expected {expected}, found {found}")]
    ColumnCount {
        row: u64,
        expected: usize,
        found: usize,
    },

    #[error("unknown label {label:?} at row {row}")]
    UnknownLabel { row: u64, label: String },

    #[error("nothing to export")]
    NothingToExport,

    #[error("{}: {err}", path.display())]
    Io { path: PathBuf, err: std::io::Error },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            err: source,
        }
    }
}
