use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("config parse error: {0}")]
    ConfigParse(String),

    #[error("invalid config field `{field}`: {reason}")]
    InvalidConfig { field: String, reason: String },

    #[error("invalid distribution parameter: {0}")]
    InvalidParameter(String),

    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("malformed timeline for claim {claim_no}: {reason}")]
    Timeline { claim_no: u64, reason: String },

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("malformed CSV at row {row}: {reason}")]
    Csv { row: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
