use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SolverError {
    #[error("constraint {constraint} has {found} coefficients, expected {expected}")]
    DimensionMismatch {
        constraint: usize,
        expected: usize,
        found: usize,
    },
    #[error("objective has {found} coefficients, expected {expected}")]
    ObjectiveDimension { expected: usize, found: usize },
    #[error("variable {var} has empty bounds [{lower}, {upper}]")]
    InvalidBounds { var: usize, lower: f64, upper: f64 },
    #[error("variable {0} is declared binary but out of range")]
    InvalidBinary(usize),
    #[error("non-finite coefficient in {0}")]
    NonFinite(&'static str),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("branch-and-bound node limit of {0} exceeded")]
    NodeLimit(usize),
}
