use thiserror::Error;

use crate::poly::VarIndex;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("grade error in {op}: expected {expected}, found {found}")]
    Grade {
        op: &'static str,
        expected: String,
        found: usize,
    },
    #[error("symplectic form is not invertible on the needed support (index {index:?})")]
    NotInvertible { index: Option<VarIndex> },
    #[error("arity error: expected {expected} arguments, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("truncation too large: {size} basis elements exceed the cap of {cap}")]
    TruncationTooLarge { size: usize, cap: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn grade(op: &'static str, expected: impl Into<String>, found: usize) -> Self {
        Error::Grade {
            op,
            expected: expected.into(),
            found,
        }
    }
}
