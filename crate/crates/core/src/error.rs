use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at line {line}, token {token:?}: {message}")]
    Parse {
        line: usize,
        token: String,
        message: String,
    },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("enumeration cap exceeded: {0}")]
    CapExceeded(String),
    #[error("not doubly stochastic: {0}")]
    NotDoublyStochastic(String),
    #[error("invalid linear vector: {0}")]
    InvalidVector(String),
    #[error("invalid transfer function: {0}")]
    InvalidTransfer(String),
    #[error("mechanism is not anonymous on the reconstruction profile:\n{0}")]
    NotAnonymous(String),
    #[error("objective is unbounded along ray {ray:?}")]
    Unbounded { ray: Vec<String> },
    #[error("certificate rejected: {0}")]
    Certificate(String),
    #[error("variable budget exceeded: {needed} variables needed, budget {budget}")]
    Budget { needed: usize, budget: usize },
    #[error("time budget exhausted: {0}")]
    Timeout(String),
    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, token: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            token: token.into(),
            message: message.into(),
        }
    }
}
