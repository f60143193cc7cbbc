use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TsfError {
    #[error("dataset is empty")]
    EmptyDataset,

    #[error("{what}: expected {expected} elements, found {found}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid class label {label} at instance {index} (labels are 1-based)")]
    InvalidLabel { index: usize, label: i64 },

    #[error("non-finite value at instance {instance}, t = {t}")]
    NonFiniteValue { instance: usize, t: usize },

    #[error("invalid interval ({t1}, {t2}) for series length {length}")]
    InvalidInterval { t1: usize, t2: usize, length: usize },

    #[error("time index {t} out of range 1..={length}")]
    IndexOutOfRange { t: usize, length: usize },

    #[error("child class counts do not sum to the parent counts")]
    DistributionMismatch,

    #[error("cannot sample {m} distinct items from 1..={n}")]
    InvalidSampleSize { n: usize, m: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("ragged rows: line {line} has {found} fields, expected {expected}")]
    RaggedRows {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("file contains no data rows")]
    EmptyFile,

    #[error("label {0} does not occur in the training label set")]
    UnknownLabel(i64),

    #[error("malformed model: {0}")]
    Model(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, TsfError>;
