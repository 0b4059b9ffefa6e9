use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("{0} is not symmetric")]
    NotSymmetric(String),

    #[error("{0} is not positive definite (gamma too small or degenerate features?)")]
    NotPositiveDefinite(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("training diverged at epoch {epoch} (last finite loss: {last_finite_loss:?})")]
    Diverged {
        epoch: usize,
        last_finite_loss: Option<f64>,
    },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("malformed record {id:?}: {reason}")]
    MalformedRecord { id: String, reason: &'static str },

    #[error("empty vocabulary")]
    EmptyVocabulary,

    #[error("no examples after label filtering")]
    NoExamples,

    #[error("labels missing from the embedding vocabulary: {}", .0.join(", "))]
    MissingLabels(Vec<String>),

    #[error("label {label:?} has {available} examples, needs at least {required}")]
    InsufficientExamples {
        label: String,
        available: usize,
        required: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input data).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotPositiveDefinite(_) | Error::NonFinite(_) | Error::Diverged { .. }
        )
    }
}
