//! θ-ordinal dominance, robust dominance over the lexicographically
//! simplest models, and three-way prediction.

use std::sync::Mutex;

use robord_solver::{solve_lp, LinearProgram, Relation, SolveStatus, EPS_STRICT};
use serde::{Deserialize, Serialize};

use crate::cover::{Check, DiffSystem, HitProblem, Weight};
use crate::error::{Error, Result};
use crate::lexmodel::{big_m_program, solve_big_m, BigMOutcome, LexOptions, LexSignature, LexStrategy};
use crate::model::{Alternative, Model, PreferenceSet, Subset};

/// Whether `f(a) > f(b)` for every value function on `theta` that
/// represents `r` with unit margin. Every pair of `r`, including `(a, b)`
/// itself, constrains the value functions.
pub fn theta_dominates(r: &PreferenceSet, theta: &Model, a: Alternative, b: Alternative) -> Result<bool> {
    let subsets: Vec<Subset> = theta.subsets().collect();
    let diff = |x: Alternative, y: Alternative| -> Vec<(usize, f64)> {
        subsets
            .iter()
            .enumerate()
            .filter_map(|(j, s)| {
                let d = s.is_subset_of(x) as i8 - s.is_subset_of(y) as i8;
                (d != 0).then_some((j, d as f64))
            })
            .collect()
    };
    let mut lp = LinearProgram::new();
    lp.add_variables(subsets.len(), f64::NEG_INFINITY, f64::INFINITY);
    for (j, c) in diff(a, b) {
        lp.set_objective_coefficient(j, c);
    }
    for (x, y) in r.essential_pairs() {
        lp.add_sparse_constraint(&diff(x, y), Relation::Ge, 1.0);
    }
    let res = solve_lp(&lp)?;
    match res.status {
        SolveStatus::Infeasible => Err(Error::InfeasibleModel),
        SolveStatus::Unbounded => Ok(false),
        SolveStatus::Optimal => Ok(res.value > EPS_STRICT),
    }
}

/// Outcome of one direction of a robust query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RobustAnswer {
    pub dominates: bool,
    /// Weighted size of a simplest model admitting `f(b) ≥ f(a)`, when one
    /// exists; it always equals the signature's `ws`.
    pub reverse_ws: Option<usize>,
}

/// Whether `a` robustly dominates `b`: no lexicographically simplest model
/// of `r` admits a representing value function with `f(b) ≥ f(a)`.
pub fn robust_dominates(r: &PreferenceSet, sig: &LexSignature, a: Alternative, b: Alternative) -> Result<bool> {
    Ok(robust_query(r, sig, a, b, &LexOptions::default())?.dominates)
}

pub fn robust_query(
    r: &PreferenceSet,
    sig: &LexSignature,
    a: Alternative,
    b: Alternative,
    opts: &LexOptions,
) -> Result<RobustAnswer> {
    RobustContext::new(r, sig, opts).query(a, b)
}

/// Robust queries against one preference set. Cores of the plain margin
/// system found while answering a query hold for every query, so they are
/// pooled and reused.
pub struct RobustContext<'a> {
    r: &'a PreferenceSet,
    sig: &'a LexSignature,
    opts: LexOptions,
    universe: Vec<Subset>,
    plain: DiffSystem,
    pool: Mutex<Vec<Vec<usize>>>,
}

impl<'a> RobustContext<'a> {
    pub fn new(r: &'a PreferenceSet, sig: &'a LexSignature, opts: &LexOptions) -> Self {
        let universe = sig.universe(r.n());
        let pool = sig.core_indices(&universe);
        RobustContext {
            r,
            sig,
            opts: *opts,
            plain: DiffSystem::new(r, universe.clone()),
            universe,
            pool: Mutex::new(pool),
        }
    }

    /// Cores known for the plain margin system.
    pub fn pooled_cores(&self) -> usize {
        self.pool.lock().map(|p| p.len()).unwrap_or(0)
    }

    pub fn query(&self, a: Alternative, b: Alternative) -> Result<RobustAnswer> {
        let sig = self.sig;
        let not_dominating = RobustAnswer {
            dominates: false,
            reverse_ws: Some(sig.ws),
        };
        // With identical alternatives or the empty model, f(b) = f(a) always.
        if a == b || sig.deg == 0 {
            return Ok(not_dominating);
        }
        let dominating = RobustAnswer {
            dominates: true,
            reverse_ws: None,
        };
        match self.opts.strategy {
            LexStrategy::CoreGuided => {
                let universe = &self.universe;
                let sys = DiffSystem::new(self.r, universe.clone()).with_reverse_row(a, b);
                let witness: Vec<bool> = universe.iter().map(|&s| sig.witness.contains(s)).collect();
                if sys.is_feasible(&witness)? {
                    return Ok(not_dominating);
                }
                let mut local: Vec<Vec<usize>> = Vec::new();
                loop {
                    let cores: Vec<Vec<usize>> = {
                        let pool = self.pool.lock().expect("core pool");
                        pool.iter().chain(&local).cloned().collect()
                    };
                    let problem = HitProblem {
                        universe,
                        cores: &cores,
                        weight: Weight::Size,
                        card_cap: Some(sig.card),
                        size_cap: Some(sig.ws),
                        stop_at: usize::MAX,
                    };
                    let Some(cand) = problem.solve(self.opts.hitting, &self.opts.mip)? else {
                        return Ok(dominating);
                    };
                    if let Check::Infeasible(res) = self.plain.check(&cand)? {
                        let core = self.plain.core(&cand, res, self.opts.greedy_cores)?;
                        if core.is_empty() {
                            return Err(Error::InconsistentPreferences);
                        }
                        self.pool.lock().expect("core pool").push(core);
                        continue;
                    }
                    match sys.check(&cand)? {
                        Check::Feasible => return Ok(not_dominating),
                        Check::Infeasible(res) => {
                            let core = sys.core(&cand, res, self.opts.greedy_cores)?;
                            if core.is_empty() {
                                return Ok(dominating);
                            }
                            local.push(core);
                        }
                    }
                }
            }
            LexStrategy::BigM => {
                let (r, universe) = (self.r, &self.universe);
                let u = universe.len();
                let outcome = solve_big_m(
                    universe,
                    |m| {
                        let mut lp = big_m_program(r, universe, Some((a, b)), m);
                        let mut row = vec![0.0; 2 * u];
                        row[u..].iter_mut().for_each(|x| *x = 1.0);
                        lp.add_constraint(row, Relation::Le, sig.card as f64);
                        for (k, s) in universe.iter().enumerate() {
                            lp.set_objective_coefficient(u + k, s.len() as f64);
                        }
                        lp
                    },
                    &self.opts,
                )?;
                match outcome {
                    BigMOutcome::Infeasible => Ok(dominating),
                    BigMOutcome::Optimal { value, .. } => {
                        let value = value as usize;
                        if value > sig.ws {
                            Ok(dominating)
                        } else {
                            Ok(RobustAnswer {
                                dominates: false,
                                reverse_ws: Some(value),
                            })
                        }
                    }
                }
            }
        }
    }

    pub fn predict(&self, a: Alternative, b: Alternative) -> Result<PredictionOutcome> {
        let forward = self.query(a, b)?;
        let backward = self.query(b, a)?;
        let verdict = match (forward.dominates, backward.dominates) {
            (true, false) => Verdict::LeftBetter,
            (false, true) => Verdict::RightBetter,
            (false, false) => Verdict::Unknown,
            (true, true) => {
                return Err(Error::Solver(robord_solver::SolverError::Numerical(format!(
                    "robust dominance holds both ways between {a} and {b}"
                ))))
            }
        };
        Ok(PredictionOutcome {
            verdict,
            forward,
            backward,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    LeftBetter,
    RightBetter,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PredictionOutcome {
    pub verdict: Verdict,
    /// Certificate of the query "a over b".
    pub forward: RobustAnswer,
    /// Certificate of the query "b over a".
    pub backward: RobustAnswer,
}

pub fn predict(r: &PreferenceSet, sig: &LexSignature, a: Alternative, b: Alternative) -> Result<PredictionOutcome> {
    predict_with(r, sig, a, b, &LexOptions::default())
}

pub fn predict_with(
    r: &PreferenceSet,
    sig: &LexSignature,
    a: Alternative,
    b: Alternative,
    opts: &LexOptions,
) -> Result<PredictionOutcome> {
    RobustContext::new(r, sig, opts).predict(a, b)
}
