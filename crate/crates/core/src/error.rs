use thiserror::Error;

/// Errors shared across the calculator modules.
///
/// `Inconclusive` is reserved for oracles that cannot certify an answer at
/// the configured truncation depth; callers map it to exit code 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("search budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("inconclusive at this truncation: {0}")]
    Inconclusive(String),
    #[error("out of method scope: {0}")]
    OutOfScope(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Inconclusive(_) => 3,
            _ => 2,
        }
    }
}
