use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// A node, time or brute-force budget ran out before the answer was known.
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// An identity that must hold between two computed values did not.
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
