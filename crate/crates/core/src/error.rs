use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),
    #[error("invalid coefficients: {0}")]
    InvalidField(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("basis fingerprint mismatch: file has {found}, diagram has {expected}")]
    FingerprintMismatch { expected: String, found: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::InvalidDiagram(_) | Error::InvalidField(_) | Error::Json(_) => 2,
            Error::DimensionMismatch(_) | Error::Precondition(_) => 3,
            Error::FingerprintMismatch { .. } => 4,
            Error::Io(_) => 1,
        }
    }

    /// Short machine-readable category for structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse(_) => "parse",
            Error::InvalidDiagram(_) => "invalid_diagram",
            Error::InvalidField(_) => "invalid_field",
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::Precondition(_) => "precondition",
            Error::FingerprintMismatch { .. } => "fingerprint_mismatch",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
