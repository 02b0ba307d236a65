//! Error types shared across the crate.

use std::path::PathBuf;

use thiserror::Error;

/// Errors arising from dataset construction, ingestion, and transforms.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed csv in {path}: {message}")]
    Csv { path: PathBuf, message: String },
    #[error("label column {column:?} not found")]
    MissingColumn { column: String },
    #[error("non-binary label {value:?} at row {row}")]
    NonBinaryLabel { row: usize, value: String },
    #[error("non-numeric cell at row {row}, column {column:?}")]
    NonNumericCell { row: usize, column: String },
    #[error("non-finite attribute at row {row}, column {column}")]
    NonFinite { row: usize, column: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dataset is empty")]
    Empty,
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
}

/// Errors raised by model evaluation and training.
#[derive(Debug, Error)]
pub enum TrainError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("degenerate data: {0}")]
    Degenerate(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// Errors raised by metric computations.
#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("empty input")]
    EmptyInput,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("constant input has no defined correlation")]
    ConstantInput,
    #[error("all model weights are zero")]
    AllZeroWeights,
    #[error("groups do not partition the feature indices: {0}")]
    InvalidPartition(String),
}

/// Errors raised by cross-validation and the benchmark harness.
#[derive(Debug, Error)]
pub enum SelectError {
    #[error("fold {fold} contains a single class; need both for training")]
    FoldDegenerate { fold: usize },
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error(transparent)]
    Data(#[from] DataError),
}

/// Errors surfaced by model serialization.
#[derive(Debug, Error)]
pub enum ModelIoError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed model file {path}: {message}")]
    Malformed { path: PathBuf, message: String },
    #[error("unsupported format version {found} (this build reads {supported})")]
    UnsupportedVersion { found: u32, supported: u32 },
}
