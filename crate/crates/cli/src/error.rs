use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid scenario: {0}")]
    Validation(String),
    #[error("{context}")]
    Computation {
        context: String,
        #[source]
        source: warpcurv::Error,
    },
    #[error("{} of {total} verification checks failed", .failed.len())]
    VerificationFailed { failed: Vec<String>, total: usize },
    #[error("{}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 1 validation, 2 computation, 3 I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse { .. } | CliError::Validation(_) => 1,
            CliError::Computation { .. } | CliError::VerificationFailed { .. } => 2,
            CliError::Io { .. } => 3,
        }
    }

    pub fn computation(context: impl Into<String>) -> impl FnOnce(warpcurv::Error) -> CliError {
        let context = context.into();
        move |source| CliError::Computation { context, source }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
