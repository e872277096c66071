//! Core-guided search over sub-models of a fixed universe of subsets.
//!
//! A candidate model `T ⊆ U` is checked through the Farkas alternative of
//! the margin system: `T` is infeasible iff some convex combination of the
//! difference vectors (plus a non-negative multiple of an optional extra
//! row) vanishes on `T`. Every infeasible `T` is grown to a maximal
//! infeasible superset `T*`; each feasible model must then use a subset of
//! `U \ T*` (a core). Minimal models are found by a hitting-set program over
//! the collected cores.

use robord_solver::{solve_lp, solve_mip, LinearProgram, MipOptions, MixedProgram, Relation};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{PreferenceSet, Subset};

const RESIDUAL_TOL: f64 = 1e-9;

pub(crate) struct DiffSystem {
    pub universe: Vec<Subset>,
    /// `rows[i][k] = I_{A_i}(U_k) − I_{B_i}(U_k)`.
    rows: Vec<Vec<i8>>,
    /// Optional non-strict row `extra·v ≥ 0`.
    extra: Option<Vec<i8>>,
}

pub(crate) enum Check {
    Feasible,
    /// Residual of the certificate on every universe element; it is zero
    /// on the checked set.
    Infeasible(Vec<f64>),
}

impl DiffSystem {
    pub fn new(r: &PreferenceSet, universe: Vec<Subset>) -> Self {
        let rows = r
            .essential_pairs()
            .into_iter()
            .map(|(a, b)| {
                universe
                    .iter()
                    .map(|s| s.is_subset_of(a) as i8 - s.is_subset_of(b) as i8)
                    .collect()
            })
            .collect();
        DiffSystem {
            universe,
            rows,
            extra: None,
        }
    }

    /// Adds the row `(I_b − I_a)·v ≥ 0`.
    pub fn with_reverse_row(mut self, a: Subset, b: Subset) -> Self {
        self.extra = Some(
            self.universe
                .iter()
                .map(|s| s.is_subset_of(b) as i8 - s.is_subset_of(a) as i8)
                .collect(),
        );
        self
    }

    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn check(&self, members: &[bool]) -> Result<Check> {
        let m = self.rows.len();
        if m == 0 {
            return Ok(Check::Feasible);
        }
        let width = m + self.extra.is_some() as usize;
        let mut lp = LinearProgram::new();
        lp.add_variables(width, 0.0, f64::INFINITY);
        for k in (0..self.len()).filter(|&k| members[k]) {
            let mut coeffs: Vec<f64> = self.rows.iter().map(|row| row[k] as f64).collect();
            if let Some(extra) = &self.extra {
                coeffs.push(extra[k] as f64);
            }
            if coeffs.iter().all(|&c| c == 0.0) {
                continue;
            }
            lp.add_constraint(coeffs, Relation::Eq, 0.0);
        }
        let mut norm = vec![1.0; m];
        norm.resize(width, 0.0);
        lp.add_constraint(norm, Relation::Eq, 1.0);
        let res = solve_lp(&lp)?;
        if !res.is_optimal() {
            return Ok(Check::Feasible);
        }
        let lam = &res.point;
        let residual = (0..self.len())
            .map(|k| {
                let mut s: f64 = self.rows.iter().zip(lam).map(|(row, l)| row[k] as f64 * l).sum();
                if let Some(extra) = &self.extra {
                    s += extra[k] as f64 * lam[m];
                }
                s
            })
            .collect();
        Ok(Check::Infeasible(residual))
    }

    pub fn is_feasible(&self, members: &[bool]) -> Result<bool> {
        Ok(matches!(self.check(members)?, Check::Feasible))
    }

    /// Adds every element the certificate vanishes on, as long as the
    /// enlarged set stays infeasible.
    fn absorb(&self, members: &mut [bool], mut residual: Vec<f64>) -> Result<()> {
        loop {
            let mut grown = members.to_vec();
            let mut changed = false;
            for k in 0..self.len() {
                if !grown[k] && residual[k].abs() <= RESIDUAL_TOL {
                    grown[k] = true;
                    changed = true;
                }
            }
            if !changed {
                return Ok(());
            }
            match self.check(&grown)? {
                Check::Infeasible(next) => {
                    members.copy_from_slice(&grown);
                    residual = next;
                }
                Check::Feasible => return Ok(()),
            }
        }
    }

    /// Grows the infeasible set `members` to a maximal one and returns its
    /// complement. An empty core means no sub-model of the universe is
    /// feasible.
    pub fn core(&self, members: &[bool], residual: Vec<f64>, greedy: bool) -> Result<Vec<usize>> {
        let mut set = members.to_vec();
        self.absorb(&mut set, residual)?;
        if greedy {
            for k in (0..self.len()).rev() {
                if set[k] {
                    continue;
                }
                set[k] = true;
                match self.check(&set)? {
                    Check::Infeasible(res) => self.absorb(&mut set, res)?,
                    Check::Feasible => set[k] = false,
                }
            }
        }
        Ok((0..self.len()).filter(|&k| !set[k]).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Weight {
    Card,
    Size,
}

/// A hitting-set problem over the universe: meet every core, respect the
/// caps, and minimize the weight (or stop at the first qualifying set).
pub(crate) struct HitProblem<'a> {
    pub universe: &'a [Subset],
    pub cores: &'a [Vec<usize>],
    pub weight: Weight,
    pub card_cap: Option<usize>,
    pub size_cap: Option<usize>,
    /// Known lower bound on the optimum: the search stops at the first set
    /// of at most this weight (`usize::MAX` accepts any admissible set).
    pub stop_at: usize,
}

impl HitProblem<'_> {
    fn weight_of(&self, k: usize) -> usize {
        match self.weight {
            Weight::Card => 1,
            Weight::Size => self.universe[k].len(),
        }
    }

    pub fn solve(&self, method: HittingSetMethod, mip: &MipOptions) -> Result<Option<Vec<bool>>> {
        if self.cores.iter().any(|c| c.is_empty()) {
            return Ok(None);
        }
        match method {
            HittingSetMethod::Search => Ok(self.search()),
            HittingSetMethod::Mip => self.mip(mip),
        }
    }

    fn mip(&self, mip: &MipOptions) -> Result<Option<Vec<bool>>> {
        let u = self.universe.len();
        let mut lp = LinearProgram::new();
        lp.add_variables(u, 0.0, 1.0);
        if self.stop_at != usize::MAX {
            lp.set_objective((0..u).map(|k| self.weight_of(k) as f64).collect());
        }
        for core in self.cores {
            let terms: Vec<(usize, f64)> = core.iter().map(|&k| (k, 1.0)).collect();
            lp.add_sparse_constraint(&terms, Relation::Ge, 1.0);
        }
        if let Some(c) = self.card_cap {
            lp.add_constraint(vec![1.0; u], Relation::Le, c as f64);
        }
        if let Some(w) = self.size_cap {
            lp.add_constraint(self.universe.iter().map(|s| s.len() as f64).collect(), Relation::Le, w as f64);
        }
        let mp = MixedProgram::new(lp, (0..u).collect())?;
        let res = solve_mip(&mp, mip)?;
        if !res.is_optimal() {
            return Ok(None);
        }
        Ok(Some(res.point.iter().map(|&x| x > 0.5).collect()))
    }

    /// Depth-first branch and bound on bitsets. Each node branches on the
    /// elements of an unmet core with the fewest admissible elements;
    /// bounds come from a greedy packing of pairwise disjoint unmet cores.
    fn search(&self) -> Option<Vec<bool>> {
        let u = self.universe.len();
        let words = u.div_ceil(64).max(1);
        let cores: Vec<Vec<u64>> = self
            .cores
            .iter()
            .map(|c| {
                let mut bits = vec![0u64; words];
                for &k in c {
                    bits[k / 64] |= 1 << (k % 64);
                }
                bits
            })
            .collect();
        let mut s = Search {
            p: self,
            cores,
            words,
            best: None,
            best_cost: usize::MAX,
            done: false,
        };
        let mut node = Node {
            chosen: vec![0; words],
            banned: vec![0; words],
            cost: 0,
            count: 0,
            size: 0,
        };
        s.dfs(&mut node);
        s.best.map(|bits| (0..u).map(|k| bits[k / 64] >> (k % 64) & 1 == 1).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HittingSetMethod {
    /// Dedicated combinatorial branch and bound.
    #[default]
    Search,
    /// Binary program through the generic MIP solver.
    Mip,
}

struct Node {
    chosen: Vec<u64>,
    banned: Vec<u64>,
    cost: usize,
    count: usize,
    size: usize,
}

struct Search<'a, 'b> {
    p: &'a HitProblem<'b>,
    cores: Vec<Vec<u64>>,
    words: usize,
    best: Option<Vec<u64>>,
    best_cost: usize,
    done: bool,
}

fn meets(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).any(|(x, y)| x & y != 0)
}

fn elements(bits: &[u64]) -> impl Iterator<Item = usize> + '_ {
    bits.iter().enumerate().flat_map(|(w, &x)| {
        let mut x = x;
        std::iter::from_fn(move || {
            (x != 0).then(|| {
                let t = x.trailing_zeros() as usize;
                x &= x - 1;
                w * 64 + t
            })
        })
    })
}

impl Search<'_, '_> {
    fn dfs(&mut self, node: &mut Node) {
        if self.done {
            return;
        }
        // Admissible elements of every unmet core.
        let mut open: Vec<(u32, Vec<u64>)> = Vec::new();
        for core in &self.cores {
            if meets(core, &node.chosen) {
                continue;
            }
            let avail: Vec<u64> = core.iter().zip(&node.banned).map(|(c, b)| c & !b).collect();
            let pop: u32 = avail.iter().map(|x| x.count_ones()).sum();
            if pop == 0 {
                return;
            }
            open.push((pop, avail));
        }
        if open.is_empty() {
            let within = self.p.card_cap.is_none_or(|c| node.count <= c)
                && self.p.size_cap.is_none_or(|c| node.size <= c);
            if within && node.cost < self.best_cost {
                self.best_cost = node.cost;
                self.best = Some(node.chosen.clone());
                self.done = node.cost <= self.p.stop_at;
            }
            return;
        }
        open.sort_by_key(|(pop, _)| *pop);
        let (mut lb_cost, mut lb_count, mut lb_size) = (0, 0, 0);
        let mut used = vec![0u64; self.words];
        for (_, avail) in &open {
            if meets(avail, &used) {
                continue;
            }
            let mut w_min = usize::MAX;
            let mut s_min = usize::MAX;
            for k in elements(avail) {
                w_min = w_min.min(self.p.weight_of(k));
                s_min = s_min.min(self.p.universe[k].len());
            }
            lb_cost += w_min;
            lb_count += 1;
            lb_size += s_min;
            for (u, a) in used.iter_mut().zip(avail) {
                *u |= a;
            }
        }
        if node.cost + lb_cost >= self.best_cost
            || self.p.card_cap.is_some_and(|c| node.count + lb_count > c)
            || self.p.size_cap.is_some_and(|c| node.size + lb_size > c)
        {
            return;
        }
        let mut branch: Vec<usize> = elements(&open[0].1).collect();
        branch.sort_by_key(|&k| (self.p.weight_of(k), self.p.universe[k].len()));
        let banned_before = node.banned.clone();
        for k in branch {
            let (w, sz) = (self.p.weight_of(k), self.p.universe[k].len());
            node.chosen[k / 64] |= 1 << (k % 64);
            node.cost += w;
            node.count += 1;
            node.size += sz;
            self.dfs(node);
            node.chosen[k / 64] &= !(1 << (k % 64));
            node.cost -= w;
            node.count -= 1;
            node.size -= sz;
            if self.done {
                break;
            }
            node.banned[k / 64] |= 1 << (k % 64);
        }
        node.banned = banned_before;
    }
}
