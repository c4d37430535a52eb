use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a precondition (wrong sign, not finite, out of range, ...).
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    /// An output level outside the schedule's valid range.
    #[error("output y = {y} outside valid range [{lo}, {hi}]")]
    OutputOutOfRange { y: i64, lo: u32, hi: u32 },

    /// A behavioral model was called with a worker of the wrong kind.
    #[error("wrong worker kind for {op}: expected {expected}")]
    WrongWorkerKind {
        op: &'static str,
        expected: &'static str,
    },

    /// The requested quantity is not identified from the data.
    #[error("not identified: {0}")]
    Unidentified(String),

    /// A statistical routine received degenerate data (too few points,
    /// zero variance, rank-deficient design, ...).
    #[error("degenerate data: {0}")]
    DegenerateData(String),

    /// A delimited-input failure tied to a specific data row and column.
    #[error("data row {row}, column `{column}`: {reason}")]
    Csv {
        row: usize,
        column: String,
        reason: String,
    },

    /// A configuration document is malformed or internally inconsistent.
    #[error("invalid config: {0}")]
    Config(String),

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }
}
