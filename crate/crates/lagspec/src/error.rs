use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AppError {
    #[error(transparent)]
    Core(#[from] lagspec_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("malformed {what}: {detail}")]
    Format { what: &'static str, detail: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Usage(String),
}

pub type AppResult<T> = Result<T, AppError>;

impl AppError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        AppError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn format(what: &'static str, detail: impl ToString) -> Self {
        AppError::Format {
            what,
            detail: detail.to_string(),
        }
    }

    /// Bad input from the caller as opposed to a failure while running.
    pub fn is_usage(&self) -> bool {
        use lagspec_core::Error as E;
        match self {
            AppError::Usage(_) | AppError::Format { .. } => true,
            AppError::Core(e) => !matches!(
                e,
                E::SolverFailure { .. } | E::Quadrature { .. } | E::BranchAmbiguity { .. }
            ),
            _ => false,
        }
    }
}
