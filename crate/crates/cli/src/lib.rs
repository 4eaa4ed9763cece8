//! File formats and experiment campaigns behind the `comprecon` binary.

pub mod experiment;
pub mod format;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Core(#[from] comprecon::Error),
}

impl CliError {
    /// 2 for usage and parse errors, 3 for resource caps, 1 for a decode
    /// that did not yield a unique member.
    pub fn exit_code(&self) -> u8 {
        use comprecon::Error as E;
        match self {
            CliError::Usage(_) | CliError::Parse(_) | CliError::Io(_) => 2,
            CliError::Core(E::Resource(_)) => 3,
            CliError::Core(
                E::Undecodable(_) | E::Ambiguous { .. } | E::Capability(_) | E::InconsistentReadout(_) | E::MissingClass(_),
            ) => 1,
            CliError::Core(_) => 2,
        }
    }
}
