//! Learning θ-additive preference models from strict pairwise comparisons
//! and predicting with robust ordinal dominance.
//!
//! An alternative is a subset of a ground set of binary features. A model
//! `θ` is a family of feature subsets; its utilities are
//! `f(A) = Σ_{S∈θ, S⊆A} v_S`. Given comparisons `R`, the crate finds the
//! signature `(deg, card, ws)` of the lexicographically simplest models
//! representing `R` and answers pairwise queries with better, worse or
//! unknown, the last whenever some simplest model disagrees.

pub mod baselines;
mod cover;
pub mod datagen;
pub mod degree;
pub mod dominance;
mod error;
pub mod lexmodel;
pub mod metrics;
pub mod model;
pub mod oracle;

pub use dominance::{
    predict, predict_with, robust_dominates, robust_query, theta_dominates, PredictionOutcome, RobustAnswer, RobustContext,
    Verdict,
};
pub use error::{Error, Result};
pub use lexmodel::{
    lex_signature, lex_signature_with, theta_feasible, HittingSetMethod, LexOptions, LexSignature, LexStrategy,
};
pub use model::{
    derive_preferences, evaluate, indicator, Alternative, CollisionPolicy, GroundSet, Model, PreferenceSet,
    RatedDataset, Subset, ValueFunction,
};
