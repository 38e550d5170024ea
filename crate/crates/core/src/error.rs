use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("cone does not strictly contain the orthant")]
    OrthantNotInterior,

    #[error("direction not interior to recession cone (row {row}: B_j·k = {value})")]
    DirectionNotInterior { row: usize, value: f64 },

    #[error("point {index} is not properly efficient; minimal-K is infinite")]
    NotProperlyEfficient { index: usize },

    #[error("index {index} out of range for a cloud of {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("rejection sampling budget exceeded after {draws} draws ({accepted} accepted)")]
    SamplingBudget { draws: usize, accepted: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("line {line}: {message}")]
    Input { line: usize, message: String },

    #[error("internal verification failed in {op}: {detail}")]
    Verification { op: &'static str, detail: String },

    #[error("{op}: {source}")]
    Op {
        op: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Attach the name of the operation that produced the error.
    pub fn in_op(self, op: &'static str) -> Self {
        match self {
            e @ Error::Op { .. } => e,
            e => Error::Op {
                op,
                source: Box::new(e),
            },
        }
    }

    /// True for failures of a self-check that must never fire on valid input.
    pub fn is_tripwire(&self) -> bool {
        match self {
            Error::Verification { .. } => true,
            Error::Op { source, .. } => source.is_tripwire(),
            _ => false,
        }
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
