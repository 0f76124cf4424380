use thiserror::Error;

/// Errors raised anywhere in the pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("duplicate declaration of `{0}`")]
    Duplicate(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
    #[error("unknown definition `{0}`")]
    UnknownDefinition(String),
    #[error("negative constant: {0}")]
    NegativeConstant(String),
    #[error("recursive definition involving `{0}`")]
    RecursiveDefinition(String),
    #[error("`{name}` expects {expected} argument(s), got {got}")]
    Arity {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("bad argument: {0}")]
    BadArgument(String),
    #[error("malformed input: {0}")]
    Format(String),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("interface mismatch: {0}")]
    InterfaceMismatch(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("Unrealizable: {0}")]
    Unrealizable(String),
    #[error("numerical failure (residual {0:e})")]
    Numerical(f64),
    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub fn parse(line: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            col,
            msg: msg.into(),
        }
    }

    /// True for every error caused by malformed textual input.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::Duplicate(_)
                | Error::UnknownVariable(_)
                | Error::UnknownConstant(_)
                | Error::UnknownDefinition(_)
                | Error::NegativeConstant(_)
                | Error::RecursiveDefinition(_)
                | Error::Arity { .. }
                | Error::BadArgument(_)
                | Error::Format(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
