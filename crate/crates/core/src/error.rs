use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("row {row} of the subspace is not in the span of the space")]
    NotContained { row: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("selection is not closed under boundary: cell {cell} of grade {grade} has a face outside it")]
    NotClosed { grade: usize, cell: usize },
    #[error("empty selection")]
    EmptySelection,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("search budget of {limit} nodes exceeded")]
    Budget { limit: u64 },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}
