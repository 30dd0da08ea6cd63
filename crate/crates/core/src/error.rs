use thiserror::Error;

/// Errors raised by the analyses in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what}: {count} candidates exceed the enumeration cap {cap}")]
    CapExceeded { what: &'static str, count: f64, cap: f64 },

    #[error("signal is not in the range of the dictionary (relative residual {residual:e})")]
    NotInRange { residual: f64 },

    #[error("matrix is rank deficient: {0}")]
    RankDeficient(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// Short machine-readable tag, used by the CLI's error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::CapExceeded { .. } => "cap_exceeded",
            Error::NotInRange { .. } => "not_in_range",
            Error::RankDeficient(_) => "rank_deficient",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::Parse { .. } => "parse",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
