use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("provider unavailable: {0}")]
    ProviderUnavailable(String),

    #[error("no recorded response for request {hash} ({kind}) in replay-only mode")]
    ReplayMiss { hash: String, kind: String },

    #[error("malformed model response: {0}")]
    MalformedResponse(String),

    #[error("invalid claim: {0}")]
    InvalidClaim(String),

    #[error("generated evidence for {claim_id} still supports the banned fact")]
    GenerationLeak { claim_id: String },

    #[error("every key fact for {claim_id} was removed by the similarity filter")]
    EmptyKeys { claim_id: String },

    #[error("missing annotation: {0}")]
    MissingAnnotation(String),

    #[error("{path}:{line}: parse error: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}:{line}: schema error on field `{field}`: {message}")]
    Schema {
        path: PathBuf,
        line: usize,
        field: String,
        message: String,
    },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("template error: {0}")]
    Template(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("output directory {0} is locked by another run")]
    Locked(PathBuf),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable name used in failure summaries.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ProviderUnavailable(_) => "ProviderUnavailable",
            Error::ReplayMiss { .. } => "ReplayMiss",
            Error::MalformedResponse(_) => "MalformedResponse",
            Error::InvalidClaim(_) => "InvalidClaim",
            Error::GenerationLeak { .. } => "GenerationLeak",
            Error::EmptyKeys { .. } => "EmptyKeys",
            Error::MissingAnnotation(_) => "MissingAnnotation",
            Error::Parse { .. } => "ParseError",
            Error::Schema { .. } => "SchemaError",
            Error::Invariant(_) => "InvariantViolation",
            Error::Template(_) => "TemplateError",
            Error::Config(_) => "ConfigError",
            Error::Locked(_) => "Locked",
            Error::Io { .. } => "IoError",
            Error::Json(_) => "JsonError",
        }
    }

    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }
}
