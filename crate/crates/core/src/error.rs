use robord_solver::SolverError;
use thiserror::Error;

use crate::model::Subset;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("ground set size {0} outside 1..=20")]
    GroundSetSize(usize),
    #[error("duplicate feature label {0:?}")]
    DuplicateLabel(String),
    #[error("alternative {bits:#b} uses features beyond n = {n}")]
    OutOfGroundSet { bits: u32, n: usize },
    #[error("models may not contain the empty subset")]
    EmptySubset,
    #[error("value function domain does not match the model")]
    DomainMismatch,
    #[error("alternative {0} compared with itself")]
    SelfPreference(Subset),
    #[error("pair {0} vs {1} appears in both orientations")]
    BothOrientations(Subset, Subset),
    #[error("conflicting ratings for identical alternatives: {}", list(.0))]
    ConflictingRatings(Vec<Subset>),
    #[error("rating {rating} outside scale 1..={scale}")]
    RatingOutOfScale { rating: u32, scale: u32 },
    #[error("degree {tau} outside 1..={n}")]
    DegreeOutOfRange { tau: usize, n: usize },
    #[error("preferences are inconsistent: no model represents them")]
    InconsistentPreferences,
    #[error("model does not represent the preferences")]
    InfeasibleModel,
    #[error("big-M value function saturated at M = {0:e}")]
    BigMSaturation(f64),
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

fn list(v: &[Subset]) -> String {
    v.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", ")
}

pub type Result<T> = std::result::Result<T, Error>;
