//! Brute-force references: explicit enumeration of the models of a
//! preference set and of its simplest models.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::dominance::theta_dominates;
use crate::error::{Error, Result};
use crate::lexmodel::theta_feasible;
use crate::model::{subsets_up_to, Alternative, Model, PreferenceSet, Subset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationBudget {
    /// Largest ground set accepted.
    pub max_n: usize,
    /// Largest pool of candidate subsets a search may draw from.
    pub max_subset_pool: usize,
    /// Largest number of candidate models checked by one call.
    pub max_candidates: u64,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget {
            max_n: 5,
            max_subset_pool: 31,
            max_candidates: 1 << 22,
        }
    }
}

impl EnumerationBudget {
    fn check_n(&self, n: usize) -> Result<()> {
        if n > self.max_n {
            return Err(Error::BudgetExceeded(format!("n = {n} > {}", self.max_n)));
        }
        Ok(())
    }

    fn check_pool(&self, pool: usize) -> Result<()> {
        if pool > self.max_subset_pool {
            return Err(Error::BudgetExceeded(format!(
                "subset pool {pool} > {}",
                self.max_subset_pool
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Simplicity {
    Deg,
    Card,
    Ws,
    Lex,
}

struct Counter<'a> {
    used: u64,
    budget: &'a EnumerationBudget,
}

impl Counter<'_> {
    fn charge(&mut self, k: u64) -> Result<()> {
        self.used = self.used.saturating_add(k);
        if self.used > self.budget.max_candidates {
            return Err(Error::BudgetExceeded(format!(
                "more than {} candidate models",
                self.budget.max_candidates
            )));
        }
        Ok(())
    }
}

fn count_combinations(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for j in 0..k {
        c = c * (n - j) as u128 / (j + 1) as u128;
        if c > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    c as u64
}

fn model_of(pool: &[Subset], pick: &[usize]) -> Model {
    Model::new(pick.iter().map(|&k| pool[k])).expect("pool holds non-empty subsets")
}

/// Feasible models drawn from `pool` with exactly `card` elements, in
/// lexicographic order of their canonical subset lists.
fn feasible_of_card(
    r: &PreferenceSet,
    pool: &[Subset],
    card: usize,
    keep: impl Fn(&Model) -> bool,
    counter: &mut Counter,
) -> Result<Vec<Model>> {
    counter.charge(count_combinations(pool.len(), card))?;
    let mut out = Vec::new();
    for pick in (0..pool.len()).combinations(card) {
        let model = model_of(pool, &pick);
        if keep(&model) && theta_feasible(r, &model)? {
            out.push(model);
        }
    }
    Ok(out)
}

/// Every model (subset of the non-empty subsets of F) representing `r`, by
/// increasing cardinality.
pub fn enumerate_theta_r(r: &PreferenceSet, budget: &EnumerationBudget) -> Result<Vec<Model>> {
    let n = r.n();
    budget.check_n(n)?;
    let pool = subsets_up_to(n, n);
    budget.check_pool(pool.len())?;
    if pool.len() >= 63 || 1u64 << pool.len() > budget.max_candidates {
        return Err(Error::BudgetExceeded(format!(
            "2^{} candidate models",
            pool.len()
        )));
    }
    let mut counter = Counter { used: 0, budget };
    let mut out = Vec::new();
    for card in 0..=pool.len() {
        out.extend(feasible_of_card(r, &pool, card, |_| true, &mut counter)?);
    }
    Ok(out)
}

/// Models with total size exactly `ws` drawn from `pool`, in canonical
/// order of their subset lists.
fn models_of_size(pool: &[Subset], ws: usize) -> Vec<Vec<usize>> {
    fn rec(pool: &[Subset], from: usize, left: usize, pick: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(pick.clone());
            return;
        }
        for k in from..pool.len() {
            let s = pool[k].len();
            if s <= left {
                pick.push(k);
                rec(pool, k + 1, left - s, pick, out);
                pick.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(pool, 0, ws, &mut Vec::new(), &mut out);
    out
}

/// The members of Θ^R that are minimal for the given simplicity relation.
pub fn enumerate_simplest(
    r: &PreferenceSet,
    relation: Simplicity,
    budget: &EnumerationBudget,
) -> Result<Vec<Model>> {
    let n = r.n();
    budget.check_n(n)?;
    if r.is_empty() {
        return Ok(vec![Model::empty()]);
    }
    let mut counter = Counter { used: 0, budget };
    match relation {
        Simplicity::Card => {
            let pool = subsets_up_to(n, n);
            budget.check_pool(pool.len())?;
            for card in 1..=pool.len() {
                let found = feasible_of_card(r, &pool, card, |_| true, &mut counter)?;
                if !found.is_empty() {
                    return Ok(found);
                }
            }
        }
        Simplicity::Ws => {
            let pool = subsets_up_to(n, n);
            budget.check_pool(pool.len())?;
            let total: usize = pool.iter().map(|s| s.len()).sum();
            for ws in 1..=total {
                let picks = models_of_size(&pool, ws);
                counter.charge(picks.len() as u64)?;
                let mut found = Vec::new();
                for pick in picks {
                    let model = model_of(&pool, &pick);
                    if theta_feasible(r, &model)? {
                        found.push(model);
                    }
                }
                if !found.is_empty() {
                    found.sort_by(|x, y| x.card().cmp(&y.card()).then_with(|| x.subsets().cmp(y.subsets())));
                    return Ok(found);
                }
            }
        }
        Simplicity::Deg => {
            for deg in 1..=n {
                let pool = subsets_up_to(n, deg);
                budget.check_pool(pool.len())?;
                let mut found = Vec::new();
                for card in 1..=pool.len() {
                    found.extend(feasible_of_card(r, &pool, card, |m| m.deg() == deg, &mut counter)?);
                }
                if !found.is_empty() {
                    return Ok(found);
                }
            }
        }
        Simplicity::Lex => {
            for deg in 1..=n {
                let pool = subsets_up_to(n, deg);
                budget.check_pool(pool.len())?;
                for card in 1..=pool.len() {
                    let found = feasible_of_card(r, &pool, card, |m| m.deg() == deg, &mut counter)?;
                    if let Some(ws) = found.iter().map(|m| m.ws()).min() {
                        return Ok(found.into_iter().filter(|m| m.ws() == ws).collect());
                    }
                }
            }
        }
    }
    Err(Error::InconsistentPreferences)
}

/// Whether `theta_dominates` holds for every simplest model.
pub fn oracle_robust_dominates(
    r: &PreferenceSet,
    relation: Simplicity,
    a: Alternative,
    b: Alternative,
    budget: &EnumerationBudget,
) -> Result<bool> {
    let simplest = enumerate_simplest(r, relation, budget)?;
    dominated_by_all(r, &simplest, a, b)
}

/// Whether `theta_dominates(r, θ, a, b)` for all `θ` in `models`.
pub fn dominated_by_all(r: &PreferenceSet, models: &[Model], a: Alternative, b: Alternative) -> Result<bool> {
    for theta in models {
        if !theta_dominates(r, theta, a, b)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Explicit-vector test of degree feasibility: the margin system over all
/// subsets of size at most `tau`, solved as an LP.
pub fn feasible_at_degree_lp(r: &PreferenceSet, tau: usize) -> Result<bool> {
    theta_feasible(r, &Model::up_to_degree(r.n(), tau))
}

/// Smallest τ for which [`feasible_at_degree_lp`] holds.
pub fn min_degree_lp(r: &PreferenceSet) -> Result<usize> {
    if r.is_empty() {
        return Ok(0);
    }
    for tau in 1..=r.n() {
        if feasible_at_degree_lp(r, tau)? {
            return Ok(tau);
        }
    }
    Err(Error::InconsistentPreferences)
}

/// Alternatives as hand-checkable fixtures.
pub mod fixtures {
    use super::*;

    /// The sixteen alternatives over four features, best first, with the
    /// full set tied with the empty set.
    pub fn example_order() -> Vec<Vec<Alternative>> {
        let s = Subset::of;
        vec![
            vec![s(&[2, 3, 4])],
            vec![s(&[1, 3, 4])],
            vec![s(&[1, 2, 4])],
            vec![s(&[3, 4])],
            vec![s(&[2, 4])],
            vec![s(&[2, 3])],
            vec![s(&[1, 4])],
            vec![s(&[1, 3])],
            vec![s(&[1, 2])],
            vec![s(&[4])],
            vec![s(&[3])],
            vec![s(&[2])],
            vec![s(&[1])],
            vec![s(&[1, 2, 3, 4]), Subset::EMPTY],
            vec![s(&[1, 2, 3])],
        ]
    }

    /// Every strict comparison of [`example_order`].
    pub fn example_closure() -> PreferenceSet {
        PreferenceSet::from_ranking(4, &example_order()).expect("valid ranking")
    }

    /// The four singletons plus `{a1,a2,a3}`.
    pub fn example_theta1() -> Model {
        let mut m = Model::singletons(4);
        m.insert(Subset::of(&[1, 2, 3])).expect("non-empty");
        m
    }

    /// The chain `{a4} ≻ {a3} ≻ {a2} ≻ {a1}`, all comparisons.
    pub fn singleton_chain() -> PreferenceSet {
        let order: Vec<Vec<Alternative>> = [4, 3, 2, 1].iter().map(|&i| vec![Subset::of(&[i])]).collect();
        PreferenceSet::from_ranking(4, &order).expect("valid ranking")
    }
}
