use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("not found: {0}")]
    NotFound(String),
    #[error("topology error: {0}")]
    Topology(String),
    #[error("presentation error: {0}")]
    Presentation(String),
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("placement error: {0}")]
    Placement(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("truncation required: {0}")]
    TruncationRequired(String),
    #[error("path error: {0}")]
    Path(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable kind, used in CLI error documents.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotFound(_) => "not_found",
            Error::Topology(_) => "topology",
            Error::Presentation(_) => "presentation",
            Error::InvariantViolation(_) => "invariant_violation",
            Error::Domain(_) => "domain",
            Error::Placement(_) => "placement",
            Error::Geometry(_) => "geometry",
            Error::TruncationRequired(_) => "truncation_required",
            Error::Path(_) => "path",
            Error::Parse(_) => "parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
