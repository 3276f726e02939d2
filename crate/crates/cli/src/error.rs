use thiserror::Error;

use crate::dsl::Pos;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("error at {pos}: {msg}")]
    Semantic { pos: Pos, msg: String },
    #[error("undefined name `{name}` at {pos}")]
    Undefined { name: String, pos: Pos },
    #[error("`{name}` at {pos} is already defined at {first}")]
    Redefined { name: String, pos: Pos, first: Pos },
    #[error("{0}")]
    Input(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn syntax(pos: Pos, msg: impl Into<String>) -> Self {
        CliError::Syntax { pos, msg: msg.into() }
    }

    pub fn semantic(pos: Pos, msg: impl Into<String>) -> Self {
        CliError::Semantic { pos, msg: msg.into() }
    }

    /// Wraps an engine error raised while evaluating the declaration at `pos`.
    pub fn engine(pos: Pos, err: sgmod::Error) -> Self {
        if is_internal(&err) {
            CliError::Internal(format!("at {pos}: {err}"))
        } else {
            CliError::Semantic { pos, msg: err.to_string() }
        }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Internal(_) => 3,
            _ => 1,
        }
    }
}

pub fn is_internal(err: &sgmod::Error) -> bool {
    use sgmod::Error::*;
    matches!(err, Internal(_) | WitnessRejected(_) | NotComplete(_))
}
