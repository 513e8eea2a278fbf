use thiserror::Error;

use crate::specialize::Rejection;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("interval precision exhausted at {bits} bits while {context}")]
    Precision { bits: u32, context: String },

    #[error("no integer specialization found after {attempts} draws ({} rejections recorded)", transcript.len())]
    Specialization {
        attempts: usize,
        transcript: Vec<Rejection>,
    },

    /// The presentation does not describe an integral domain, or a constraint is zero in it.
    #[error("presentation not a domain or constraint zero: {0}")]
    NotADomain(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
