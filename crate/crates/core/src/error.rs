use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse {what}: {input:?}")]
    Parse { what: &'static str, input: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("matrix has determinant {0}, expected 1")]
    NotUnimodular(String),
    #[error("chain of degree {degree} is not a cycle ({terms} boundary terms survive)")]
    NotACycle { degree: usize, terms: usize },
    #[error("word does not map to the identity matrix")]
    NotIdentity,
    #[error("rewrite budget of {budget} steps exhausted")]
    Timeout { budget: usize },
    #[error("rewrite {rule} is not applicable at position {position}")]
    NotApplicable { rule: String, position: usize },
    #[error("rewrite {0} changed the matrix image")]
    Unsound(String),
    #[error("integer {0} has a prime factor that does not fit in 64 bits")]
    FactorTooLarge(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precondition<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(msg.into()))
}
