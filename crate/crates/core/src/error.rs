use thiserror::Error;

use crate::bdd::BddError;
use crate::formula::{FormulaError, ParseError};

/// Top-level error of the checker.
#[derive(Debug, Error)]
pub enum Error {
    #[error("formula syntax error at {0}")]
    FormulaSyntax(#[from] ParseError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Bdd(#[from] BddError),
    #[error(transparent)]
    Model(#[from] crate::cgs::ModelError),
    #[error(transparent)]
    Automaton(#[from] crate::dpa::AutomatonError),
    #[error("{0}")]
    Limit(String),
    #[error("timed out after {0} s")]
    Timeout(u64),
    #[error("{0}")]
    Invalid(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Resource exhaustion as opposed to bad input.
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            Error::Limit(_) | Error::Timeout(_) | Error::Bdd(BddError::BudgetExceeded { .. })
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
