use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("invalid IRI {iri:?}: {reason}")]
    InvalidIri { iri: String, reason: &'static str },

    #[error("invalid term: {0}")]
    InvalidTerm(String),

    /// The request was rejected locally before anything was sent.
    #[error("request error: {0}")]
    Request(String),

    #[error("transport error: {0}")]
    Transport(String),

    #[error("protocol error: upstream answered HTTP {status}")]
    Protocol { status: u16, body: String },

    #[error("format error: {0}")]
    Format(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("no entity could be linked for the question")]
    NoEntity,

    #[error("entity {0} has no valid candidate relations")]
    EmptyCandidates(String),

    #[error("duplicate question id {0:?}")]
    DuplicateId(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable error name used in service responses and reports.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "ParseError",
            Error::InvalidIri { .. } => "InvalidIriError",
            Error::InvalidTerm(_) => "InvalidTermError",
            Error::Request(_) => "RequestError",
            Error::Transport(_) => "TransportError",
            Error::Protocol { .. } => "ProtocolError",
            Error::Format(_) => "FormatError",
            Error::Dimension { .. } => "DimensionError",
            Error::NoEntity => "NoEntityError",
            Error::EmptyCandidates(_) => "EmptyCandidatesError",
            Error::DuplicateId(_) => "DuplicateIdError",
            Error::Config(_) => "ConfigError",
            Error::Io(_) => "IoError",
        }
    }

    pub(crate) fn parse(line: usize, reason: impl Into<String>) -> Self {
        Error::Parse {
            line,
            reason: reason.into(),
        }
    }
}
