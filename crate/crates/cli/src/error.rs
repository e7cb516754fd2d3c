use std::path::PathBuf;

use thiserror::Error;

/// Process exit status for configuration problems.
pub const EXIT_VALIDATION: u8 = 2;
/// Process exit status for failed numerical checks.
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: lr_decoherence::Error,
    },
}

impl CliError {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config { key: key.into(), message: message.into() }
    }

    pub fn core(context: impl Into<String>, source: lr_decoherence::Error) -> Self {
        CliError::Core { context: context.into(), source }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core { source, .. } if is_numerical(source) => EXIT_NUMERICAL,
            _ => EXIT_VALIDATION,
        }
    }
}

/// Errors that signal a numerical failure rather than a bad configuration.
pub fn is_numerical(e: &lr_decoherence::Error) -> bool {
    use lr_decoherence::Error::*;
    matches!(
        e,
        CoordinateSingularity { .. } | StepHalving { .. } | Singular | NotAntiHermitian { .. } | NotNormalized(_)
    )
}

pub type Result<T> = std::result::Result<T, CliError>;
