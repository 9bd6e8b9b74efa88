use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}: file contains no data rows")]
    EmptyFile(String),

    #[error("{name}: row {row} has {found} cells, expected {expected}")]
    RaggedRow {
        name: String,
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("{name}: non-numeric value {value:?} at row {row}, column {column}")]
    NonNumeric {
        name: String,
        row: usize,
        column: usize,
        value: String,
    },

    #[error(
        "{name}: missing value at row {row}, column {column} (enable mean imputation to accept)"
    )]
    MissingValue {
        name: String,
        row: usize,
        column: usize,
    },

    #[error("{name}: malformed input: {reason}")]
    Malformed { name: String, reason: String },

    #[error("label column {0:?} not found")]
    UnknownLabelColumn(String),

    #[error("duplicate attribute name {0:?}")]
    DuplicateAttribute(String),

    #[error("need at least {needed} objects, got {found}")]
    TooFewObjects { needed: usize, found: usize },

    #[error("attribute index {index} out of range for {len} attributes")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("duplicate attribute index {0} in feature subset")]
    DuplicateIndex(usize),

    #[error("expected {expected} attributes, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("partitions cover different universes ({left} vs {right} objects)")]
    UniverseMismatch { left: usize, right: usize },

    #[error("decision attribute set is empty")]
    EmptyDecision,

    #[error("attribute subset is empty")]
    EmptySubset,

    #[error(
        "exhaustive reduct search refused: {attributes} attributes exceeds the limit of {limit}"
    )]
    TooManyAttributes { attributes: usize, limit: usize },

    #[error("non-finite value at row {row}, column {column}")]
    NonFinite { row: usize, column: usize },

    #[error("table has no class labels")]
    Unlabeled,

    #[error("fold {0} has no training rows")]
    EmptyTrainingFold(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("registry line {line}: {reason}")]
    Registry { line: usize, reason: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for errors caused by the input data rather than by the caller's
    /// parameters.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::Io { .. }
                | Error::EmptyFile(_)
                | Error::RaggedRow { .. }
                | Error::NonNumeric { .. }
                | Error::MissingValue { .. }
                | Error::Malformed { .. }
                | Error::UnknownLabelColumn(_)
                | Error::DuplicateAttribute(_)
                | Error::TooFewObjects { .. }
                | Error::NonFinite { .. }
                | Error::Unlabeled
                | Error::Registry { .. }
                | Error::Json(_)
        )
    }
}
