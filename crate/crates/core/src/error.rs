use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed file at byte offset {offset}: {reason}")]
    Malformed { offset: usize, reason: String },

    #[error("event {index} out of bounds: {reason}")]
    OutOfBounds { index: usize, reason: String },

    #[error("cannot encode event {index}: {reason}")]
    Encoding { index: usize, reason: String },

    #[error("parse error at line {line}: {reason}")]
    Parse { line: u64, reason: String },

    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic { expected: &'static str, found: Vec<u8> },

    #[error("truncated payload: expected {expected} {what}, found {actual}")]
    Truncated {
        what: &'static str,
        expected: u64,
        actual: u64,
    },

    #[error("invalid stream: {0}")]
    InvalidStream(String),

    #[error("degenerate time window: t_start = t_end = {0} with at least one event")]
    DegenerateWindow(u64),

    #[error("kernel configuration error in layer {layer}: {reason}")]
    Kernel { layer: usize, reason: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("k = {k} exceeds the number of distinct values ({distinct})")]
    DegenerateK { k: usize, distinct: usize },

    #[error("undefined metric: {0}")]
    Undefined(String),

    #[error("degenerate gradient: vector {index} has zero norm")]
    DegenerateGradient { index: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("{}: {source}", path.display())]
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

    /// True for errors caused by the filesystem rather than by the data.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}
