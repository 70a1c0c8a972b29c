use thiserror::Error;

/// Errors raised by the compiler library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A type invariant does not hold; `defect` is the measured violation.
    #[error("{what} (defect {defect:.3e})")]
    Invariant { what: String, defect: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("gate {0} has no matrix semantics")]
    NoMatrix(&'static str),

    #[error("not a pure unitary circuit: contains {0}")]
    NotUnitaryCircuit(&'static str),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("unsupported gate for this operation: {0}")]
    Unsupported(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn invariant(what: impl Into<String>, defect: f64) -> Self {
        Error::Invariant {
            what: what.into(),
            defect,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
