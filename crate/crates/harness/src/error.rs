use std::io;
use std::path::PathBuf;

use qdiag::algorithms::AlgorithmError;
use qdiag::metrics::MetricsError;
use qdiag::mutation::MutationError;
use qdiag::{CircuitError, SimError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown preset `{0}` (expected grover, dj-constant, dj-balanced or simon)")]
    PresetNotFound(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("malformed circuit file {path}: {source}")]
    CircuitFile { path: PathBuf, source: CircuitError },
    #[error("malformed {what} in {path}: {message}")]
    Malformed {
        what: &'static str,
        path: PathBuf,
        message: String,
    },
    #[error("no persisted run in {0}")]
    MissingRun(PathBuf),
    #[error("unknown export format `{0}` (expected csv, json or svg-data)")]
    UnknownFormat(String),
    #[error("cannot read {path}: {source}")]
    Unreadable { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Algorithm(#[from] AlgorithmError),
    #[error(transparent)]
    Mutation(#[from] MutationError),
}

impl HarnessError {
    /// 1 for bad input, 2 for failures while simulating or writing results.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::PresetNotFound(_)
            | HarnessError::InvalidConfig(_)
            | HarnessError::CircuitFile { .. }
            | HarnessError::Malformed { .. }
            | HarnessError::MissingRun(_)
            | HarnessError::Unreadable { .. }
            | HarnessError::UnknownFormat(_)
            | HarnessError::Circuit(_) => 1,
            _ => 2,
        }
    }

    pub(crate) fn unreadable(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> HarnessError {
        let path = path.into();
        move |source| HarnessError::Unreadable { path, source }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> HarnessError {
        let path = path.into();
        move |source| HarnessError::Io { path, source }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
