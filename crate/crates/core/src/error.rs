use thiserror::Error;

/// Errors produced by the core library.
///
/// `Validation`/`Parse` mean the input was rejected; the other variants mean
/// a computation could not be carried out on otherwise well-formed input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("structural error: {0}")]
    Structure(String),

    #[error("inclusion violated: {0}")]
    Inclusion(String),

    #[error("word problem unresolved: rewriting exceeded {limit} rules")]
    WordProblem { limit: usize },

    #[error("element is not invertible: {0}")]
    NotInvertible(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn structure(msg: impl Into<String>) -> Self {
        Error::Structure(msg.into())
    }

    /// Exit code the command line tool should use for this error:
    /// 1 for rejected input, 2 for failed computations.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Validation(_) | Error::UnknownPreset(_) => 1,
            _ => 2,
        }
    }
}
