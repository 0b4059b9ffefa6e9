use std::io;
use std::path::Path;

use tagzero_core::Error as CoreError;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("{0}")]
    Data(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_DATA: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

impl CliError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn parse(path: &Path, line: usize, message: impl Into<String>) -> Self {
        CliError::Parse {
            path: path.display().to_string(),
            line,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(e) if e.is_numerical() => EXIT_NUMERICAL,
            CliError::Core(CoreError::InvalidArgument(_)) => EXIT_USAGE,
            _ => EXIT_DATA,
        }
    }

    /// A hint printed under the error message, when there is an obvious fix.
    pub fn hint(&self) -> Option<&'static str> {
        match self {
            CliError::Core(CoreError::MissingLabels(_)) => Some(
                "every label needs a '#label' token in the embedding vocabulary; retrain the embeddings on a \
                 corpus that contains it, or drop the label",
            ),
            CliError::Core(CoreError::Diverged { .. }) => Some("try a smaller learning rate"),
            CliError::Core(CoreError::NotPositiveDefinite(_)) => Some("try a larger --gamma"),
            _ => None,
        }
    }
}
