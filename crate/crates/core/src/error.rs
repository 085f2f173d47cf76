use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate histogram: {0}")]
    DegenerateHistogram(String),

    #[error("geometry mismatch: expected {expected:?}, found {found:?}")]
    GeometryMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("scan directory not found: {0}")]
    ScanNotFound(PathBuf),

    #[error("no decodable slices in {0}")]
    EmptyDirectory(PathBuf),

    #[error("mixed slice geometries in {path}: {first:?} and {other:?}")]
    MixedGeometry {
        path: PathBuf,
        first: (usize, usize),
        other: (usize, usize),
    },

    #[error("cannot decode image {path}: {reason}")]
    Decode { path: PathBuf, reason: String },

    #[error("mask source mismatch: {0}")]
    MaskSource(String),

    #[error("scan has no retained slices")]
    EmptyScan,

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("feature dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("corrupt model file: {0}")]
    CorruptModel(String),

    #[error("unsupported model file: {0}")]
    ModelVersion(String),

    #[error("malformed {what}: {reason}")]
    Parse { what: String, reason: String },

    #[error("invalid phantom spec: {0}")]
    PhantomSpec(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    pub(crate) fn parse(what: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse {
            what: what.into(),
            reason: reason.into(),
        }
    }

    /// Process exit code for the command-line front end: 1 usage, 2 data, 3 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_) => 1,
            Error::Invariant(_) => 3,
            _ => 2,
        }
    }
}
