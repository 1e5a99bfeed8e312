use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid handlebody: {0}")]
    InvalidHandlebody(String),

    #[error("unknown handle id `{0}`")]
    UnknownHandle(String),

    #[error("handle `{0}` carries no Legendrian data (tb/rot)")]
    MissingLegendrian(String),

    #[error("zig-zag count d={d} exceeds t={t}")]
    ZigzagRange { t: u64, d: u64 },

    #[error("zig-zag target unreachable for handle `{id}`: {reason}")]
    Unreachable { id: String, reason: String },

    #[error("W-modification coefficient must be positive")]
    NonPositiveCoefficient,

    #[error("record index {0} out of range")]
    RecordIndex(usize),

    #[error("record {0} is not a W-modification")]
    NotWMove(usize),

    #[error("Stein structure choice incomplete: {0}")]
    IncompleteChoice(String),

    #[error("class vector has length {got}, expected {expected}")]
    ClassLength { expected: usize, got: usize },

    #[error("basis error: {0}")]
    Basis(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("integer overflow converting {0}")]
    Overflow(String),

    #[error("certificate refused: {0}")]
    Refused(String),

    #[error("construction inconsistency: {0}")]
    Construction(String),

    #[error("i/o: {0}")]
    Io(String),

    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
