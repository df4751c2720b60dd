use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("row {row}, column '{column}': cannot parse '{cell}' as a finite number")]
    BadCell {
        /// 1-based data row (the header is row 0).
        row: usize,
        column: String,
        cell: String,
    },

    #[error("column '{0}' not found")]
    MissingColumn(String),

    #[error("duplicate column name '{0}'")]
    DuplicateColumn(String),

    #[error("no predictor columns")]
    NoPredictors,

    #[error("need at least {min} rows, got {n}")]
    TooFewRows { n: usize, min: usize },

    #[error("size mismatch: {0}")]
    ShapeMismatch(String),

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid model spec: {0}")]
    InvalidSpec(String),

    #[error("graph is not acyclic")]
    NotAcyclic,

    #[error("unknown node '{0}'")]
    UnknownNode(String),

    #[error("mechanisms are not flagged separable; refusing to label ground truth")]
    NotSeparable,

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("internal: {0}")]
    Internal(String),
}

impl Error {
    /// Whether the error stems from user input (bad files, flags, specs) rather
    /// than a failure inside the toolkit.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Internal(_))
    }
}
