//! Small dense LP / binary MIP engine.
//!
//! Linear programs are solved with a two-phase tableau simplex (Dantzig
//! pricing, switching to Bland's rule on degenerate stalls so the method
//! cannot cycle). Binary mixed programs use depth-first branch-and-bound on
//! the LP relaxation, branching on the most fractional binary.

mod error;
mod lp;
mod mip;
mod tableau;

pub use error::SolverError;
pub use lp::{solve_lp, Constraint, LinearProgram, Relation, SolveResult, SolveStatus};
pub use mip::{solve_mip, MipOptions, MixedProgram};

/// Feasibility tolerance applied when re-checking optimal points.
pub const EPS_FEAS: f64 = 1e-6;

/// Threshold for "strictly positive" tests made by callers on LP optima.
pub const EPS_STRICT: f64 = 1e-7;
