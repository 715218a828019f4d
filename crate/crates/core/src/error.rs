use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("duplicate token {token:?} at lines {first} and {second}")]
    DuplicateToken { token: String, first: usize, second: usize },

    #[error("vocabulary is empty")]
    EmptyVocabulary,

    #[error("length mismatch: {what} has {found} entries, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("index {index} out of range for width {width}")]
    IndexOutOfRange { index: usize, width: usize },

    #[error("bag indices must be strictly increasing (index {index} follows {previous})")]
    UnsortedIndices { previous: usize, index: usize },

    #[error("bag count for index {index} must be >= 1")]
    ZeroCount { index: usize },

    #[error("label {0} is not binary")]
    InvalidLabel(u8),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("width mismatch: expected {expected}, found {found}")]
    WidthMismatch { expected: usize, found: usize },

    #[error("shape mismatch in {0}")]
    ShapeMismatch(&'static str),

    #[error("polarity-weighted encoding requires a polarity table")]
    MissingPolarity,

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("training diverged at epoch {epoch}, batch {batch}: {reason}")]
    Diverged {
        epoch: usize,
        batch: usize,
        reason: &'static str,
    },

    #[error("optimizer did not converge within {0} iterations")]
    NoConvergence(usize),
}
