use std::path::PathBuf;

use optgap_core::adversary::AdversaryError;
use optgap_core::computable::ComputeError;
use optgap_core::families::FamilyError;
use optgap_core::solvers::SolverError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Adversary(#[from] AdversaryError),
    #[error(transparent)]
    Compute(#[from] ComputeError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot read or write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }

    /// Process exit code for a failed command.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Adversary(AdversaryError::ReplayMismatch { .. }) => 3,
            _ => 4,
        }
    }
}
