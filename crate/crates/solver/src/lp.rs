use crate::tableau::{self, Outcome, StandardForm};
use crate::{SolverError, EPS_FEAS};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().zip(x).map(|(a, v)| a * v).sum()
    }

    /// Amount by which `x` violates this constraint (0 when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let lhs = self.activity(x);
        match self.relation {
            Relation::Le => (lhs - self.rhs).max(0.0),
            Relation::Ge => (self.rhs - lhs).max(0.0),
            Relation::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// `min objective·x` subject to linear constraints and per-variable bounds.
///
/// Variables are added first; constraints carry one dense coefficient per
/// variable.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearProgram {
    lower: Vec<f64>,
    upper: Vec<f64>,
    objective: Vec<f64>,
    constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: SolveStatus,
    /// Objective value; NaN unless optimal.
    pub value: f64,
    /// Optimal assignment; empty unless optimal.
    pub point: Vec<f64>,
}

impl SolveResult {
    pub(crate) fn infeasible() -> Self {
        SolveResult {
            status: SolveStatus::Infeasible,
            value: f64::NAN,
            point: Vec::new(),
        }
    }

    pub(crate) fn unbounded() -> Self {
        SolveResult {
            status: SolveStatus::Unbounded,
            value: f64::NAN,
            point: Vec::new(),
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_variable(&mut self, lower: f64, upper: f64) -> usize {
        self.lower.push(lower);
        self.upper.push(upper);
        self.objective.push(0.0);
        self.lower.len() - 1
    }

    pub fn add_variables(&mut self, count: usize, lower: f64, upper: f64) -> std::ops::Range<usize> {
        let start = self.num_variables();
        for _ in 0..count {
            self.add_variable(lower, upper);
        }
        start..start + count
    }

    pub fn num_variables(&self) -> usize {
        self.lower.len()
    }

    pub fn bounds(&self, var: usize) -> (f64, f64) {
        (self.lower[var], self.upper[var])
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn set_objective(&mut self, coeffs: Vec<f64>) {
        self.objective = coeffs;
    }

    pub fn set_objective_coefficient(&mut self, var: usize, c: f64) {
        self.objective[var] = c;
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn add_constraint(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    /// Adds a constraint given as `(variable, coefficient)` terms, densified
    /// against the variables declared so far.
    pub fn add_sparse_constraint(&mut self, terms: &[(usize, f64)], relation: Relation, rhs: f64) {
        let mut coeffs = vec![0.0; self.num_variables()];
        for &(j, a) in terms {
            coeffs[j] += a;
        }
        self.add_constraint(coeffs, relation, rhs);
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let n = self.num_variables();
        if self.objective.len() != n {
            return Err(SolverError::ObjectiveDimension {
                expected: n,
                found: self.objective.len(),
            });
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(SolverError::NonFinite("objective"));
        }
        for (k, con) in self.constraints.iter().enumerate() {
            if con.coeffs.len() != n {
                return Err(SolverError::DimensionMismatch {
                    constraint: k,
                    expected: n,
                    found: con.coeffs.len(),
                });
            }
            if !con.rhs.is_finite() || con.coeffs.iter().any(|a| !a.is_finite()) {
                return Err(SolverError::NonFinite("constraint"));
            }
        }
        check_bounds(&self.lower, &self.upper)
    }

    /// Largest absolute violation of any constraint or bound by `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self
            .constraints
            .iter()
            .map(|c| c.violation(x))
            .fold(0.0, f64::max);
        let bounds = x
            .iter()
            .enumerate()
            .map(|(j, &v)| (self.lower[j] - v).max(v - self.upper[j]).max(0.0))
            .fold(0.0, f64::max);
        rows.max(bounds)
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

fn check_bounds(lower: &[f64], upper: &[f64]) -> Result<(), SolverError> {
    for (j, (&lo, &hi)) in lower.iter().zip(upper).enumerate() {
        if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(SolverError::InvalidBounds {
                var: j,
                lower: lo,
                upper: hi,
            });
        }
    }
    Ok(())
}

pub fn solve_lp(lp: &LinearProgram) -> Result<SolveResult, SolverError> {
    lp.validate()?;
    solve_with_bounds(lp, &lp.lower, &lp.upper)
}

#[derive(Debug, Clone, Copy)]
enum VarMap {
    Fixed(f64),
    Shift { col: usize, lo: f64 },
    Mirror { col: usize, hi: f64 },
    Split { pos: usize, neg: usize },
}

/// Solves `lp` with its variable bounds replaced by `lower`/`upper`. The
/// program itself must already be validated.
pub(crate) fn solve_with_bounds(
    lp: &LinearProgram,
    lower: &[f64],
    upper: &[f64],
) -> Result<SolveResult, SolverError> {
    check_bounds(lower, upper)?;
    let n = lp.num_variables();

    let mut maps = Vec::with_capacity(n);
    let mut cols = 0usize;
    let mut upper_rows: Vec<(usize, f64)> = Vec::new();
    for j in 0..n {
        let (lo, hi) = (lower[j], upper[j]);
        let map = if lo == hi {
            VarMap::Fixed(lo)
        } else if lo.is_finite() {
            let col = cols;
            cols += 1;
            if hi.is_finite() {
                upper_rows.push((col, hi - lo));
            }
            VarMap::Shift { col, lo }
        } else if hi.is_finite() {
            let col = cols;
            cols += 1;
            VarMap::Mirror { col, hi }
        } else {
            let pos = cols;
            cols += 2;
            VarMap::Split { pos, neg: pos + 1 }
        };
        maps.push(map);
    }
    let structural = cols;

    // Rows over structural columns: (coeffs, relation, rhs).
    let mut rows: Vec<(Vec<f64>, Relation, f64)> = Vec::new();
    for con in &lp.constraints {
        let mut coeffs = vec![0.0; structural];
        let mut rhs = con.rhs;
        for (j, &a) in con.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            match maps[j] {
                VarMap::Fixed(v) => rhs -= a * v,
                VarMap::Shift { col, lo } => {
                    coeffs[col] += a;
                    rhs -= a * lo;
                }
                VarMap::Mirror { col, hi } => {
                    coeffs[col] -= a;
                    rhs -= a * hi;
                }
                VarMap::Split { pos, neg } => {
                    coeffs[pos] += a;
                    coeffs[neg] -= a;
                }
            }
        }
        if coeffs.iter().all(|&a| a == 0.0) {
            let ok = match con.relation {
                Relation::Le => rhs >= -EPS_FEAS,
                Relation::Ge => rhs <= EPS_FEAS,
                Relation::Eq => rhs.abs() <= EPS_FEAS,
            };
            if !ok {
                return Ok(SolveResult::infeasible());
            }
            continue;
        }
        rows.push((coeffs, con.relation, rhs));
    }
    for &(col, width) in &upper_rows {
        let mut coeffs = vec![0.0; structural];
        coeffs[col] = 1.0;
        rows.push((coeffs, Relation::Le, width));
    }

    // Constant objective terms are dropped; the value is recomputed from the
    // original objective once the point is mapped back.
    let mut c = vec![0.0; structural];
    for (j, &cj) in lp.objective.iter().enumerate() {
        if cj == 0.0 {
            continue;
        }
        match maps[j] {
            VarMap::Fixed(_) => {}
            VarMap::Shift { col, .. } => c[col] += cj,
            VarMap::Mirror { col, .. } => c[col] -= cj,
            VarMap::Split { pos, neg } => {
                c[pos] += cj;
                c[neg] -= cj;
            }
        }
    }

    // Normalize to non-negative right-hand sides and add slack columns.
    for row in rows.iter_mut() {
        if row.2 < 0.0 {
            row.0.iter_mut().for_each(|a| *a = -*a);
            row.2 = -row.2;
            row.1 = match row.1 {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }
    let m = rows.len();
    let slacks = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let total = structural + slacks;
    let mut a = vec![0.0; m * total];
    let mut b = vec![0.0; m];
    let mut hint = vec![None; m];
    let mut next_slack = structural;
    for (i, (coeffs, rel, rhs)) in rows.iter().enumerate() {
        a[i * total..i * total + structural].copy_from_slice(coeffs);
        b[i] = *rhs;
        match rel {
            Relation::Le => {
                a[i * total + next_slack] = 1.0;
                hint[i] = Some(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                a[i * total + next_slack] = -1.0;
                next_slack += 1;
            }
            Relation::Eq => {}
        }
    }
    c.resize(total, 0.0);

    // Crash: a structural column appearing in a single row with a positive
    // coefficient can start basic in that row instead of an artificial.
    let mut nnz = vec![0usize; structural];
    let mut owner = vec![usize::MAX; structural];
    for i in 0..m {
        for j in 0..structural {
            if a[i * total + j] != 0.0 {
                nnz[j] += 1;
                owner[j] = i;
            }
        }
    }
    for j in 0..structural {
        if nnz[j] == 1 {
            let i = owner[j];
            if hint[i].is_none() && a[i * total + j] > 0.0 {
                hint[i] = Some(j);
            }
        }
    }

    // Equilibrate: rows, then columns, to unit max magnitude.
    for i in 0..m {
        let row = &mut a[i * total..(i + 1) * total];
        let big = row.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if big > 0.0 && big != 1.0 {
            row.iter_mut().for_each(|v| *v /= big);
            b[i] /= big;
        }
    }
    let mut col_scale = vec![1.0; total];
    for (j, scale) in col_scale.iter_mut().enumerate() {
        let big = (0..m).fold(0.0f64, |acc, i| acc.max(a[i * total + j].abs()));
        if big > 0.0 && big != 1.0 {
            *scale = 1.0 / big;
            for i in 0..m {
                a[i * total + j] /= big;
            }
            c[j] /= big;
        }
    }

    let a_copy = a.clone();
    let b_copy = b.clone();
    let sf = StandardForm {
        rows: m,
        cols: total,
        a,
        b,
        c,
        basis_hint: hint,
    };
    let fin = match tableau::solve(sf)? {
        Outcome::Infeasible => return Ok(SolveResult::infeasible()),
        Outcome::Unbounded => return Ok(SolveResult::unbounded()),
        Outcome::Optimal(fin) => fin,
    };
    let to_point = |x: &[f64]| -> Vec<f64> {
        let x: Vec<f64> = x.iter().zip(&col_scale).map(|(v, s)| v * s).collect();
        maps.iter()
            .map(|map| match *map {
                VarMap::Fixed(v) => v,
                VarMap::Shift { col, lo } => lo + x[col],
                VarMap::Mirror { col, hi } => hi - x[col],
                VarMap::Split { pos, neg } => x[pos] - x[neg],
            })
            .collect()
    };
    let mut point = to_point(&fin.x);
    if verify_point(lp, lower, upper, &point).is_err() {
        // Tableau drift: recompute the basic solution from the original
        // rows and the final basis.
        if let Some(x) = basic_solution(&a_copy, &b_copy, m, total, &fin) {
            point = to_point(&x);
        }
        verify_point(lp, lower, upper, &point)?;
    }
    let value = lp.objective_value(&point);
    Ok(SolveResult {
        status: crate::SolveStatus::Optimal,
        value,
        point,
    })
}

/// Solves `B x_B = b` by Gaussian elimination with partial pivoting.
fn basic_solution(a: &[f64], b: &[f64], m: usize, total: usize, fin: &tableau::Basis) -> Option<Vec<f64>> {
    let mut mat = vec![0.0; m * (m + 1)];
    let w = m + 1;
    for (k, &col) in fin.basis.iter().enumerate() {
        if col < total {
            for i in 0..m {
                mat[i * w + k] = a[i * total + col];
            }
        } else {
            mat[fin.art_rows[col - total] * w + k] = 1.0;
        }
    }
    for i in 0..m {
        mat[i * w + m] = b[i];
    }
    for k in 0..m {
        let p = (k..m).max_by(|&i, &j| mat[i * w + k].abs().total_cmp(&mat[j * w + k].abs()))?;
        if mat[p * w + k].abs() < 1e-12 {
            return None;
        }
        if p != k {
            for j in 0..w {
                mat.swap(p * w + j, k * w + j);
            }
        }
        let piv = mat[k * w + k];
        for i in 0..m {
            if i == k {
                continue;
            }
            let f = mat[i * w + k] / piv;
            if f != 0.0 {
                for j in k..w {
                    mat[i * w + j] -= f * mat[k * w + j];
                }
            }
        }
    }
    let mut x = vec![0.0; total];
    for (k, &col) in fin.basis.iter().enumerate() {
        if col < total {
            x[col] = (mat[k * w + m] / mat[k * w + k]).max(0.0);
        }
    }
    Some(x)
}

fn verify_point(
    lp: &LinearProgram,
    lower: &[f64],
    upper: &[f64],
    x: &[f64],
) -> Result<(), SolverError> {
    for (k, con) in lp.constraints.iter().enumerate() {
        let scale = con
            .coeffs
            .iter()
            .zip(x)
            .fold(1.0f64.max(con.rhs.abs()), |m, (a, v)| m.max((a * v).abs()));
        let viol = con.violation(x);
        if viol > EPS_FEAS * scale {
            return Err(SolverError::Numerical(format!(
                "constraint {k} violated by {viol:e} at the reported optimum"
            )));
        }
    }
    for (j, &v) in x.iter().enumerate() {
        let scale = 1.0f64.max(v.abs());
        if v < lower[j] - EPS_FEAS * scale || v > upper[j] + EPS_FEAS * scale {
            return Err(SolverError::Numerical(format!(
                "variable {j} = {v} outside [{}, {}]",
                lower[j], upper[j]
            )));
        }
    }
    Ok(())
}
