use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {what}: {left} vs {right}")]
    DimensionMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("expected level-0 coefficient {expected}, found {found}")]
    ScalarPart { expected: f64, found: f64 },

    #[error("word of length {len} exceeds truncation level {depth}")]
    WordTooLong { len: usize, depth: usize },

    #[error("letter {letter} outside alphabet 1..={dim}")]
    LetterOutOfRange { letter: usize, dim: usize },

    #[error("integer overflow while computing {0}")]
    Overflow(String),

    #[error("non-finite state {value} at Euler step {step}")]
    NonFinite { step: usize, value: f64 },

    #[error("driver grid does not match the Euler grid: {0}")]
    GridMismatch(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid metric spec `{spec}`: {reason}")]
    MetricSpec { spec: String, reason: String },
}

impl Error {
    /// Whether the failure is numerical (overflow, blow-up) rather than a
    /// problem with the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Overflow(_) | Error::NonFinite { .. })
    }
}
