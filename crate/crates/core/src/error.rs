use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not positive definite (pivot {value:e} at row {row})")]
    NotPositiveDefinite { row: usize, value: f64 },

    #[error("need at least 2 rows, got {0}")]
    InsufficientRows(usize),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),

    #[error("malformed csv: {0}")]
    MalformedCsv(String),

    #[error("no usable rows left after cleaning")]
    EmptyAfterCleaning,

    #[error("invalid fold count k={k} for n={n} (need k >= 2 and n >= 2k)")]
    InvalidFoldCount { n: usize, k: usize },

    #[error("degenerate config: {0}")]
    DegenerateConfig(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("numerical divergence at step {step} (eta={eta}, chi={chi}, kappa={kappa})")]
    NumericalDivergence {
        eta: f64,
        chi: f64,
        kappa: usize,
        step: u64,
    },

    #[error("no results to summarize")]
    EmptyResults,

    #[error("insufficient observations: {0}")]
    InsufficientObservations(String),

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
