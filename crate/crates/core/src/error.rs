use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("undeclared event `{0}`")]
    UndeclaredEvent(String),
    #[error("duplicate event `{0}`")]
    DuplicateEvent(String),
    #[error("{0} events declared, at most {1} supported")]
    TooManyEvents(usize, usize),
    #[error("malformed number `{0}`")]
    MalformedNumber(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("variable space mismatch: {0}")]
    SpaceMismatch(String),
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("zero polynomial where a nonzero one is required")]
    ZeroPolynomial,
    #[error("expansion exceeds {0} terms")]
    TermLimit(usize),
    #[error("invalid certificate: {0}")]
    Certificate(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
