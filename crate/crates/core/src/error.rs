use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("non-finite value at row {row}, column {col}")]
    NonFiniteValue { row: usize, col: usize },

    #[error("residual of example {0} has zero norm and cannot be projected out")]
    ZeroPivot(usize),

    #[error("no active entries to sample from")]
    NoActiveEntries,

    #[error("budget {budget} exceeds population size {population}")]
    BudgetExceedsPopulation { budget: usize, population: usize },

    #[error("need at least {needed} candidates, got {available}")]
    InsufficientCandidates { needed: usize, available: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("duplicate index {0}")]
    DuplicateIndex(usize),

    #[error("index {index} out of range for {len} examples")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("parse error: {0}")]
    ParseError(String),

    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("all x values are identical; regression slope is undefined")]
    DegenerateVariance,

    #[error("need at least {needed} rows, got {got}")]
    TooFewRows { needed: usize, got: usize },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// Stable variant name, printed by the CLI alongside the message.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidMatrix(_) => "InvalidMatrix",
            Error::NonFiniteValue { .. } => "NonFiniteValue",
            Error::ZeroPivot(_) => "ZeroPivot",
            Error::NoActiveEntries => "NoActiveEntries",
            Error::BudgetExceedsPopulation { .. } => "BudgetExceedsPopulation",
            Error::InsufficientCandidates { .. } => "InsufficientCandidates",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::UnsupportedFormat(_) => "UnsupportedFormat",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::DuplicateIndex(_) => "DuplicateIndex",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::ParseError(_) => "ParseError",
            Error::EmptyTrainingSet => "EmptyTrainingSet",
            Error::DegenerateVariance => "DegenerateVariance",
            Error::TooFewRows { .. } => "TooFewRows",
            Error::Io(_) => "Io",
        }
    }
}
