//! Membership in Θ^R and the signature of the lexicographically simplest
//! models.

use robord_solver::{solve_lp, solve_mip, LinearProgram, MipOptions, MixedProgram, Relation, EPS_FEAS};
use serde::{Deserialize, Serialize};

pub use crate::cover::HittingSetMethod;
use crate::cover::{Check, DiffSystem, HitProblem, Weight};
use crate::degree::min_degree;
use crate::error::{Error, Result};
use crate::model::{subsets_up_to, Model, PreferenceSet, Subset};

/// Whether some value function on `theta` satisfies every preference in `r`
/// with unit margin. Decided by the slack program
/// `min Σe  s.t.  (I_A − I_B)·v + e_(A,B) ≥ 1, e ≥ 0`.
pub fn theta_feasible(r: &PreferenceSet, theta: &Model) -> Result<bool> {
    if r.is_empty() {
        return Ok(true);
    }
    let subsets: Vec<Subset> = theta.subsets().collect();
    let k = subsets.len();
    let pairs = r.essential_pairs();
    let m = pairs.len();
    let mut lp = LinearProgram::new();
    lp.add_variables(k, f64::NEG_INFINITY, f64::INFINITY);
    let slacks = lp.add_variables(m, 0.0, f64::INFINITY);
    for j in slacks.clone() {
        lp.set_objective_coefficient(j, 1.0);
    }
    for (i, &(a, b)) in pairs.iter().enumerate() {
        let mut terms: Vec<(usize, f64)> = subsets
            .iter()
            .enumerate()
            .filter_map(|(j, s)| {
                let d = s.is_subset_of(a) as i8 - s.is_subset_of(b) as i8;
                (d != 0).then_some((j, d as f64))
            })
            .collect();
        terms.push((slacks.start + i, 1.0));
        lp.add_sparse_constraint(&terms, Relation::Ge, 1.0);
    }
    let res = solve_lp(&lp)?;
    Ok(res.is_optimal() && res.value <= EPS_FEAS)
}

/// How the lexicographic programs are solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LexStrategy {
    /// Hitting-set decomposition driven by infeasibility certificates.
    #[default]
    CoreGuided,
    /// The monolithic big-M programs.
    BigM,
}

#[derive(Debug, Clone, Copy)]
pub struct LexOptions {
    pub strategy: LexStrategy,
    pub big_m: f64,
    pub big_m_max: f64,
    /// Grow each infeasible set to a maximal one before taking its core.
    pub greedy_cores: bool,
    pub hitting: HittingSetMethod,
    pub mip: MipOptions,
}

impl Default for LexOptions {
    fn default() -> Self {
        LexOptions {
            strategy: LexStrategy::CoreGuided,
            big_m: 1e6,
            big_m_max: 1e12,
            greedy_cores: true,
            hitting: HittingSetMethod::Search,
            mip: MipOptions::default(),
        }
    }
}

/// `(deg, card, ws)` shared by every lexicographically simplest model, and
/// one such model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LexSignature {
    pub deg: usize,
    pub card: usize,
    pub ws: usize,
    pub witness: Model,
    /// Cores valid for every model of `R`, reused by dominance queries.
    #[serde(skip)]
    pub(crate) cores: Vec<Vec<Subset>>,
}

impl LexSignature {
    pub fn triple(&self) -> (usize, usize, usize) {
        (self.deg, self.card, self.ws)
    }

    /// Number of cached cores.
    pub fn cores_len(&self) -> usize {
        self.cores.len()
    }

    pub(crate) fn empty() -> Self {
        LexSignature {
            deg: 0,
            card: 0,
            ws: 0,
            witness: Model::empty(),
            cores: Vec::new(),
        }
    }

    /// The universe `[F]^deg` used by the programs.
    pub fn universe(&self, n: usize) -> Vec<Subset> {
        subsets_up_to(n, self.deg)
    }

    pub(crate) fn core_indices(&self, universe: &[Subset]) -> Vec<Vec<usize>> {
        self.cores
            .iter()
            .map(|core| {
                core.iter()
                    .filter_map(|s| universe.binary_search(s).ok())
                    .collect()
            })
            .collect()
    }
}

pub fn lex_signature(r: &PreferenceSet) -> Result<LexSignature> {
    lex_signature_with(r, &LexOptions::default())
}

pub fn lex_signature_with(r: &PreferenceSet, opts: &LexOptions) -> Result<LexSignature> {
    let deg = min_degree(r)?;
    if deg == 0 {
        return Ok(LexSignature::empty());
    }
    let sig = match opts.strategy {
        LexStrategy::CoreGuided => core_guided(r, deg, opts)?,
        LexStrategy::BigM => big_m_signature(r, deg, opts)?,
    };
    if !theta_feasible(r, &sig.witness)? {
        return Err(Error::Solver(robord_solver::SolverError::Numerical(
            "lexicographic witness failed the feasibility check".into(),
        )));
    }
    debug_assert_eq!(sig.witness.key(), sig.triple());
    Ok(sig)
}

fn members_to_model(universe: &[Subset], members: &[bool]) -> Model {
    Model::new(
        universe
            .iter()
            .zip(members)
            .filter(|(_, &m)| m)
            .map(|(&s, _)| s),
    )
    .expect("universe holds no empty subset")
}

fn core_guided(r: &PreferenceSet, deg: usize, opts: &LexOptions) -> Result<LexSignature> {
    let universe = subsets_up_to(r.n(), deg);
    let sys = DiffSystem::new(r, universe.clone());
    let mut cores: Vec<Vec<usize>> = Vec::new();

    let mut solve_stage = |weight: Weight, card_cap: Option<usize>| -> Result<Vec<bool>> {
        let mut floor = 0;
        loop {
            let cand = HitProblem {
                universe: &universe,
                cores: &cores,
                weight,
                card_cap,
                size_cap: None,
                stop_at: floor,
            }
            .solve(opts.hitting, &opts.mip)?
            .ok_or(Error::InconsistentPreferences)?;
            floor = cand
                .iter()
                .zip(&universe)
                .filter(|(&x, _)| x)
                .map(|(_, s)| match weight {
                    Weight::Card => 1,
                    Weight::Size => s.len(),
                })
                .sum();
            match sys.check(&cand)? {
                Check::Feasible => return Ok(cand),
                Check::Infeasible(res) => {
                    let core = sys.core(&cand, res, opts.greedy_cores)?;
                    if core.is_empty() {
                        return Err(Error::InconsistentPreferences);
                    }
                    cores.push(core);
                }
            }
        }
    };
    let first = solve_stage(Weight::Card, None)?;
    let card = first.iter().filter(|&&b| b).count();
    let second = solve_stage(Weight::Size, Some(card))?;
    let witness = members_to_model(&universe, &second);
    let ws = witness.ws();
    Ok(LexSignature {
        deg,
        card,
        ws,
        witness,
        cores: cores
            .iter()
            .map(|c| c.iter().map(|&k| universe[k]).collect())
            .collect(),
    })
}

/// Variables `v_S` then `b_S` over `universe`; margin rows for `r`, the
/// optional reverse row, and the linking rows `|v_S| ≤ M b_S`.
pub fn big_m_program(
    r: &PreferenceSet,
    universe: &[Subset],
    reverse: Option<(Subset, Subset)>,
    big_m: f64,
) -> LinearProgram {
    let u = universe.len();
    let mut lp = LinearProgram::new();
    lp.add_variables(u, f64::NEG_INFINITY, f64::INFINITY);
    lp.add_variables(u, 0.0, 1.0);
    for (a, b) in r.essential_pairs() {
        let terms: Vec<(usize, f64)> = universe
            .iter()
            .enumerate()
            .filter_map(|(k, s)| {
                let d = s.is_subset_of(a) as i8 - s.is_subset_of(b) as i8;
                (d != 0).then_some((k, d as f64))
            })
            .collect();
        lp.add_sparse_constraint(&terms, Relation::Ge, 1.0);
    }
    if let Some((a, b)) = reverse {
        let terms: Vec<(usize, f64)> = universe
            .iter()
            .enumerate()
            .filter_map(|(k, s)| {
                let d = s.is_subset_of(b) as i8 - s.is_subset_of(a) as i8;
                (d != 0).then_some((k, d as f64))
            })
            .collect();
        lp.add_sparse_constraint(&terms, Relation::Ge, 0.0);
    }
    for k in 0..u {
        lp.add_sparse_constraint(&[(k, 1.0), (u + k, -big_m)], Relation::Le, 0.0);
        lp.add_sparse_constraint(&[(k, -1.0), (u + k, -big_m)], Relation::Le, 0.0);
    }
    lp
}

pub(crate) enum BigMOutcome {
    Infeasible,
    Optimal { value: f64, point: Vec<f64> },
}

/// Solves a big-M program, escalating `M` while the optimum touches it.
pub(crate) fn solve_big_m(
    universe: &[Subset],
    build: impl Fn(f64) -> LinearProgram,
    opts: &LexOptions,
) -> Result<BigMOutcome> {
    let u = universe.len();
    let mut big_m = opts.big_m;
    loop {
        let lp = build(big_m);
        let mp = MixedProgram::new(lp, (u..2 * u).collect())?;
        let res = solve_mip(&mp, &opts.mip)?;
        if !res.is_optimal() {
            return Ok(BigMOutcome::Infeasible);
        }
        let saturated = res.point[..u].iter().any(|v| v.abs() > 0.99 * big_m);
        if !saturated {
            return Ok(BigMOutcome::Optimal {
                value: res.value.round(),
                point: res.point,
            });
        }
        if big_m * 100.0 > opts.big_m_max {
            return Err(Error::BigMSaturation(big_m));
        }
        big_m *= 100.0;
    }
}

fn big_m_signature(r: &PreferenceSet, deg: usize, opts: &LexOptions) -> Result<LexSignature> {
    let universe = subsets_up_to(r.n(), deg);
    let u = universe.len();
    let stage1 = solve_big_m(
        &universe,
        |m| {
            let mut lp = big_m_program(r, &universe, None, m);
            for k in 0..u {
                lp.set_objective_coefficient(u + k, 1.0);
            }
            lp
        },
        opts,
    )?;
    let BigMOutcome::Optimal { value: card, .. } = stage1 else {
        return Err(Error::InconsistentPreferences);
    };
    let card = card as usize;
    let stage2 = solve_big_m(
        &universe,
        |m| {
            let mut lp = big_m_program(r, &universe, None, m);
            for (k, s) in universe.iter().enumerate() {
                lp.set_objective_coefficient(u + k, s.len() as f64);
            }
            let mut row = vec![0.0; 2 * u];
            row[u..].iter_mut().for_each(|x| *x = 1.0);
            lp.add_constraint(row, Relation::Le, card as f64);
            lp
        },
        opts,
    )?;
    let BigMOutcome::Optimal { value: ws, point } = stage2 else {
        return Err(Error::InconsistentPreferences);
    };
    let members: Vec<bool> = point[u..].iter().map(|&b| b > 0.5).collect();
    let witness = members_to_model(&universe, &members);
    // The selected binaries may exceed what is needed when some v_S = 0,
    // but the objective pins card and ws.
    debug_assert_eq!(witness.ws(), ws as usize);
    Ok(LexSignature {
        deg,
        card: witness.card(),
        ws: ws as usize,
        witness,
        cores: Vec::new(),
    })
}
