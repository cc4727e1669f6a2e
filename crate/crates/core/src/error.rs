use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a supported prime modulus (must be prime and below 256)")]
    InvalidPrime(u32),

    #[error("exponent {exponent} out of range for p = {p}")]
    ExponentOutOfRange { exponent: u32, p: u32 },

    #[error("value {value} is not an element of F_{p}")]
    ValueOutOfRange { value: u32, p: u32 },

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("{what} exceeds the configured guard ({limit})")]
    TooLarge { what: String, limit: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn too_large(what: impl Into<String>, limit: impl ToString) -> Self {
        Error::TooLarge {
            what: what.into(),
            limit: limit.to_string(),
        }
    }
}
