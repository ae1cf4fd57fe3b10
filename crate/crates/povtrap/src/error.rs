use std::path::PathBuf;

/// Errors surfaced by the command-line layer.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    /// Failure inside the numerical core.
    #[error(transparent)]
    Core(#[from] povtrap_core::Error),
    /// Core failure tied to an evaluation point.
    #[error("at {what} = {at}: {source}")]
    At {
        /// Name of the swept quantity.
        what: &'static str,
        /// Its value.
        at: f64,
        /// Underlying error.
        source: povtrap_core::Error,
    },
    /// Bad flags, configuration or input file contents.
    #[error("{0}")]
    Usage(String),
    /// File could not be read or written.
    #[error("{path}: {source}")]
    Io {
        /// File involved.
        path: PathBuf,
        /// Underlying error.
        source: std::io::Error,
    },
    /// One or more diagnostics failed.
    #[error("{0} of the checks failed")]
    ChecksFailed(usize),
}

impl AppError {
    /// Process exit code: 1 failed checks, 2 invalid input, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Core(e) | AppError::At { source: e, .. } => {
                if e.is_validation() {
                    2
                } else {
                    3
                }
            }
            AppError::Usage(_) | AppError::Io { .. } => 2,
            AppError::ChecksFailed(_) => 1,
        }
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        AppError::Usage(msg.into())
    }
}

/// Attach the evaluation point to a core error.
pub(crate) fn at(what: &'static str, x: f64) -> impl FnOnce(povtrap_core::Error) -> AppError {
    move |source| AppError::At { what, at: x, source }
}

/// Result alias for the command-line layer.
pub type Result<T> = std::result::Result<T, AppError>;
