use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error type.
///
/// Variants are grouped by how the CLI reports them: validation-level
/// problems (bad files, bad arguments, degenerate inputs, alignment
/// failures) exit with code 2, estimation failures with 3, and I/O
/// failures with 4.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("validation error: {0}")]
    Validation(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("estimation error: {message}")]
    Estimation {
        message: String,
        /// Best log-likelihood reached before giving up, when one exists.
        best_loglik: Option<f64>,
    },
    #[error("alignment error: {0}")]
    Alignment(String),
    /// A pipeline stage failed; carries the stage name and the cause.
    #[error("stage '{stage}' failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn estimation(message: impl Into<String>) -> Self {
        Error::Estimation { message: message.into(), best_loglik: None }
    }

    /// Wrap an error with the name of the pipeline stage it occurred in.
    pub fn at_stage(self, stage: &'static str) -> Self {
        Error::Stage { stage, source: Box::new(self) }
    }

    /// Process exit code for the CLI: 2 validation, 3 estimation, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 4,
            Error::Estimation { .. } => 3,
            Error::Stage { source, .. } => source.exit_code(),
            _ => 2,
        }
    }
}

/// Shorthand for `Error::Argument` with format args.
#[macro_export]
macro_rules! argument_error {
    ($($arg:tt)*) => {
        $crate::error::Error::Argument(format!($($arg)*))
    };
}
