use std::path::Path;

use needle_core::{Error, FitError};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const INTERNAL: i32 = 1;
    pub const VALIDATION: i32 = 2;
    pub const NO_STRATEGY: i32 = 3;
    pub const INSUFFICIENT_DATA: i32 = 4;
    pub const IO: i32 = 5;
    pub const INVALID_PLAN: i32 = 6;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    InvalidPlan(String),
    #[error("{0}")]
    NoStrategy(String),
    #[error("{0}")]
    InsufficientData(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => exit::VALIDATION,
            CliError::InvalidPlan(_) => exit::INVALID_PLAN,
            CliError::NoStrategy(_) => exit::NO_STRATEGY,
            CliError::InsufficientData(_) => exit::INSUFFICIENT_DATA,
            CliError::Io { .. } => exit::IO,
            CliError::Internal(_) => exit::INTERNAL,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidPlan(_) | Error::PlanInfeasible => CliError::InvalidPlan(e.to_string()),
            Error::NoStrategy => CliError::NoStrategy(e.to_string()),
            Error::InsufficientData(_) => CliError::InsufficientData(e.to_string()),
            Error::IllegalAction(_) => CliError::Internal(e.to_string()),
            Error::Config(_) | Error::Coverage { .. } | Error::Range | Error::Trace(_) => {
                CliError::Validation(e.to_string())
            }
        }
    }
}

impl From<FitError> for CliError {
    fn from(e: FitError) -> Self {
        match e {
            FitError::NoStrategy { .. } => CliError::NoStrategy(e.to_string()),
            FitError::Other(inner) => inner.into(),
        }
    }
}
