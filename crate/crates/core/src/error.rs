//! Error types shared across the crate.

use std::path::PathBuf;
use thiserror::Error;

/// Errors produced by matrix and tape operations.
#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("shape mismatch in {op}: left is {left_rows}x{left_cols}, right is {right_rows}x{right_cols}")]
    Shape {
        op: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("{op} produced a non-finite value at ({row}, {col})")]
    NonFinite {
        op: &'static str,
        row: usize,
        col: usize,
    },
    #[error("invalid argument to {op}: {message}")]
    InvalidArgument { op: &'static str, message: String },
    #[error("index {index} out of range for {op} (limit {limit})")]
    IndexOutOfRange {
        op: &'static str,
        index: usize,
        limit: usize,
    },
    #[error("backward() requires a scalar loss, got {rows}x{cols}")]
    NonScalarLoss { rows: usize, cols: usize },
}

/// Errors produced while ingesting data files.
#[derive(Debug, Error)]
pub enum LoadError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}:{line}: embedding dimension {found} does not match earlier dimension {expected}")]
    DimensionMismatch {
        path: PathBuf,
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("seed references unknown {side} entity `{token}`")]
    DanglingSeed { side: &'static str, token: String },
}

/// Top-level error for pipeline, training, and CLI layers.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("validation failed with {0} issue(s)")]
    Validation(usize),
    #[error("training aborted at epoch {epoch}: non-finite loss (parameter norm {param_norm:.6e})")]
    NonFiniteTraining { epoch: usize, param_norm: f64 },
    #[error("checkpoint error: {0}")]
    Checkpoint(String),
}

impl CoreError {
    pub fn config(message: impl Into<String>) -> Self {
        CoreError::Config(message.into())
    }
}

pub type Result<T, E = CoreError> = std::result::Result<T, E>;
