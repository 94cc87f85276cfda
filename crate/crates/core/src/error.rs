use thiserror::Error;

/// Errors surfaced by machine construction, data handling and schedule execution.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("class {0} is not active")]
    InactiveClass(usize),

    #[error("address out of range: {0}")]
    Address(String),

    #[error("schedule error: {0}")]
    Schedule(String),

    #[error("accuracy analysis requires a non-empty set ({0})")]
    EmptySet(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
