use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("allocation references parcel {parcel} but the instance has {n_parcels} parcels")]
    UnknownParcel { parcel: usize, n_parcels: usize },

    #[error("allocation references worker {worker} but the instance has {n_workers} workers")]
    UnknownWorker { worker: usize, n_workers: usize },

    #[error("{matrix}: expected {expected} {axis}, found {found}")]
    Dimension {
        matrix: &'static str,
        axis: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("{matrix}: row {row} has {found} entries, expected {expected}")]
    RowLength {
        matrix: &'static str,
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("{matrix}[{row}][{col}] = {value} is not a finite non-negative number")]
    InvalidEntry {
        matrix: &'static str,
        row: usize,
        col: usize,
        value: f64,
    },

    #[error("worker {worker}: {reason}")]
    InvalidWorker { worker: usize, reason: String },

    #[error("invalid arrival order: {0}")]
    InvalidOrder(String),

    #[error("{path}: parse error at line {line}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("exhaustive oracle limited to {max_parcels} parcels and {max_workers} workers, got {n_parcels}x{n_workers}")]
    OracleSizeGuard {
        n_parcels: usize,
        n_workers: usize,
        max_parcels: usize,
        max_workers: usize,
    },

    #[error("size guard: {0}")]
    SizeGuard(String),

    #[error("mu must be >= 1, got {0}")]
    InvalidMu(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cannot access {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
