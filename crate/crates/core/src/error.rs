use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("index out of range: {0}")]
    Range(String),

    #[error("class C_{0} is missing from the readout")]
    MissingClass(usize),

    #[error("inconsistent readout: {0}")]
    InconsistentReadout(String),

    #[error("invalid complement: {0}")]
    InvalidComplement(String),

    #[error("invalid codebook spec: {0}")]
    Spec(String),

    #[error("resource cap exceeded: {0}")]
    Resource(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("undecodable: {0}")]
    Undecodable(String),

    #[error("ambiguous: {} consistent candidates", candidates.len())]
    Ambiguous { candidates: Vec<String> },

    #[error("unsupported error pattern for this code: {0}")]
    Capability(String),

    #[error("invalid error spec: {0}")]
    InvalidErrorSpec(String),

    #[error("invalid skew: {0}")]
    InvalidSkew(String),
}

pub type Result<T> = std::result::Result<T, Error>;
