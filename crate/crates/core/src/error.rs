use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("attempted to invert the zero quaternion")]
    ZeroInverse,

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    /// The equation has no solution; carries the first failing rank equality.
    #[error("equation is inconsistent: {equality} ({lhs} != {rhs})")]
    Inconsistent { equality: String, lhs: usize, rhs: usize },

    /// A constructed witness did not reach the closed-form rank.
    #[error("{expression}: {bound} witness attains rank {attained}, formula gives {formula}")]
    WitnessMissed { expression: String, bound: String, formula: usize, attained: usize },

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::InternalInconsistency(msg.into())
    }

    /// Process exit status for the command-line tool: 2 for bad input,
    /// 1 for a failed verification or an unsolvable equation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. }
            | Error::DimensionMismatch(_)
            | Error::PreconditionViolated(_)
            | Error::Io(_)
            | Error::ZeroInverse => 2,
            Error::Inconsistent { .. } | Error::WitnessMissed { .. } | Error::InternalInconsistency(_) => 1,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
