use thiserror::Error;

use crate::scalar::NumberSystem;
use crate::tensor::IndexId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {label} has dimension {left} on one side and {right} on the other")]
    DimensionMismatch {
        label: IndexId,
        left: usize,
        right: usize,
    },

    #[error("index {0} is not present on the tensor")]
    MissingLabel(IndexId),

    #[error("index {0} would appear twice on one tensor")]
    DuplicateLabel(IndexId),

    #[error("index {0} is shared by more than two tensors")]
    OverboundLabel(IndexId),

    #[error("{expected} components expected, {found} supplied")]
    ComponentCount { expected: usize, found: usize },

    #[error("matrix of size {rows}x{cols} is not a 2^k x 2^k operator")]
    NotPowerOfTwo { rows: usize, cols: usize },

    #[error("{system} numbers cannot represent {what}")]
    NumberSystem { system: NumberSystem, what: String },

    #[error("invalid contraction order: {0}")]
    InvalidOrder(String),

    #[error("bond graph contains a cycle")]
    CyclicNetwork,

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("checker condition violated: {0}")]
    CheckerViolation(String),

    #[error("strategy {strategy} does not apply: {reason}")]
    StrategyInapplicable { strategy: String, reason: String },

    #[error("contraction value {value} cannot be read as a count (residue {residue:.3e})")]
    Residue { value: f64, residue: f64 },

    #[error("contraction value {0} is negative")]
    NegativeValue(f64),

    #[error("operands act on {left} and {right} sites")]
    SiteMismatch { left: usize, right: usize },

    #[error("{what} needs {requested}, the budget is {limit}")]
    BudgetExceeded {
        what: &'static str,
        requested: usize,
        limit: usize,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn inapplicable(strategy: impl ToString, reason: impl Into<String>) -> Self {
        Error::StrategyInapplicable {
            strategy: strategy.to_string(),
            reason: reason.into(),
        }
    }
}
