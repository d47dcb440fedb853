//! Error types shared across the crate.
//!
//! Two families: [`DataError`] for anything wrong with input data (parsing,
//! schema violations, fold preconditions) and [`ModelError`] for fitting,
//! scoring, and persistence failures. The CLI maps them to distinct exit
//! codes.

use thiserror::Error;

/// Input-data errors: CSV parsing, schema validation, fold preconditions.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("schema: {0}")]
    InvalidSchema(String),

    #[error("row {row}: expected {expected} fields, found {found}")]
    RowArity { row: usize, expected: usize, found: usize },

    #[error("row {row}, feature '{feature}': unknown category '{value}'")]
    UnknownCategory { row: usize, feature: String, value: String },

    #[error("row {row}, feature '{feature}': cannot parse '{value}' as a number")]
    BadNumeric { row: usize, feature: String, value: String },

    #[error("row {row}: unknown class label '{value}'")]
    UnknownClassLabel { row: usize, value: String },

    #[error("header is missing column '{0}'")]
    MissingColumn(String),

    #[error("csv: {0}")]
    Csv(String),

    #[error("instance {index}: {reason}")]
    NonConforming { index: usize, reason: String },

    #[error("{0} row errors, first: {1}")]
    RowErrors(usize, String),

    #[error("fold count {k} exceeds size {size} of class '{class}'")]
    ClassSmallerThanFolds { k: usize, size: usize, class: String },

    #[error("fold count must be at least 2, got {0}")]
    TooFewFolds(usize),

    #[error("feature '{0}' not found in schema")]
    UnknownFeature(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("schema sidecar line {line}: {reason}")]
    Sidecar { line: usize, reason: String },

    #[error("invalid generator spec: {0}")]
    InvalidSynthSpec(String),
}

/// Model errors: fitting preconditions, scoring mismatches, persistence.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("training data must contain both classes")]
    SingleClass,

    #[error("training data is empty")]
    EmptyTrainingData,

    #[error("feature '{0}' is numeric; this model requires discretized (nominal) inputs")]
    NotDiscretized(String),

    #[error("instance does not conform to the model's input schema: {0}")]
    SchemaMismatch(String),

    #[error("cut-point model does not cover feature '{0}'")]
    CutModelMismatch(String),

    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),

    #[error("scored set contains only one class")]
    SingleClassScores,

    #[error("entropy of all-zero counts is undefined")]
    AllZeroCounts,

    #[error("n_features must be between 1 and {max}, got {got}")]
    BadFeatureCount { got: usize, max: usize },

    #[error("minority class has {minority} instances; needs more than k={k} for SMOTE")]
    MinorityTooSmall { minority: usize, k: usize },

    #[error("SMOTE percent must be a multiple of 100, got {0}")]
    BadSmotePercent(u32),

    #[error("cost ratio must be positive, got {0}")]
    BadCostRatio(f64),

    #[error("data: {0}")]
    Data(#[from] DataError),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("persisted pipeline: unsupported format version '{0}'")]
    VersionMismatch(String),

    #[error("persisted pipeline: checksum mismatch (file corrupt or tampered)")]
    ChecksumMismatch,

    #[error("persisted pipeline: line {line}: {reason}")]
    Parse { line: usize, reason: String },
}
