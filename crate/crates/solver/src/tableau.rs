//! Dense tableau simplex over a problem already in standard form
//! `min c·x, A x = b, x ≥ 0, b ≥ 0`.

use crate::SolverError;

const PIVOT_TOL: f64 = 1e-7;
const COST_TOL: f64 = 1e-9;
const DEGENERATE_STALL: usize = 50;
/// Residual phase-one objective, relative to the largest right-hand side,
/// above which a program is declared infeasible.
const PHASE1_TOL: f64 = 1e-7;

pub(crate) struct StandardForm {
    pub rows: usize,
    pub cols: usize,
    /// Row-major `rows x cols`.
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    /// Column usable as the initial basic variable of each row (a slack, or a
    /// singleton structural column with positive coefficient).
    pub basis_hint: Vec<Option<usize>>,
}

pub(crate) enum Outcome {
    Optimal(Basis),
    Infeasible,
    Unbounded,
}

/// Final basis: the column basic in each row, where columns at or beyond
/// `cols` are artificials; `art_rows[k]` is the row artificial `cols + k`
/// was created for.
pub(crate) struct Basis {
    pub x: Vec<f64>,
    pub basis: Vec<usize>,
    pub art_rows: Vec<usize>,
}

struct Tableau {
    rows: usize,
    /// Non-artificial columns; artificials occupy `cols..width - 1`.
    cols: usize,
    width: usize,
    t: Vec<f64>,
    /// Reduced costs, last entry is minus the objective value.
    d: Vec<f64>,
    basis: Vec<usize>,
    iterations: usize,
    max_iterations: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.t[i * self.width + self.width - 1]
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let w = self.width;
        let p = self.t[r * w + q];
        {
            let row = &mut self.t[r * w..(r + 1) * w];
            for x in row.iter_mut() {
                *x /= p;
            }
            row[q] = 1.0;
        }
        let nz: Vec<usize> = (0..w).filter(|&j| self.t[r * w + j] != 0.0).collect();
        let pivot_row: Vec<f64> = nz.iter().map(|&j| self.t[r * w + j]).collect();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.t[i * w + q];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.t[i * w..(i + 1) * w];
            for (&j, &v) in nz.iter().zip(&pivot_row) {
                row[j] -= f * v;
            }
            row[q] = 0.0;
        }
        let f = self.d[q];
        if f != 0.0 {
            for (&j, &v) in nz.iter().zip(&pivot_row) {
                self.d[j] -= f * v;
            }
            self.d[q] = 0.0;
        }
        self.basis[r] = q;
    }

    /// Runs simplex iterations over columns `0..limit`. Returns false on
    /// unboundedness.
    fn iterate(&mut self, limit: usize) -> Result<bool, SolverError> {
        let w = self.width;
        let mut stall = 0usize;
        loop {
            let bland = stall >= DEGENERATE_STALL;
            let mut entering = None;
            let mut best = -COST_TOL;
            for j in 0..limit {
                let dj = self.d[j];
                if dj < best {
                    entering = Some(j);
                    if bland {
                        break;
                    }
                    best = dj;
                }
            }
            let Some(q) = entering else {
                return Ok(true);
            };

            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.t[i * w + q];
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(i).max(0.0) / a;
                match leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        let tie = ratio <= lr + 1e-12;
                        let better_tie = if bland {
                            self.basis[i] < self.basis[li]
                        } else {
                            a > self.t[li * w + q]
                        };
                        if ratio < lr - 1e-12 || (tie && better_tie) {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
            let Some((r, ratio)) = leave else {
                return Ok(false);
            };
            if ratio <= 1e-12 {
                stall += 1;
            } else {
                stall = 0;
            }
            self.pivot(r, q);
            self.iterations += 1;
            if self.iterations > self.max_iterations {
                return Err(SolverError::Numerical(format!(
                    "simplex iteration limit {} reached",
                    self.max_iterations
                )));
            }
        }
    }
}

pub(crate) fn solve(sf: StandardForm) -> Result<Outcome, SolverError> {
    let StandardForm {
        rows,
        cols,
        a,
        b,
        c,
        basis_hint,
    } = sf;
    let n_art = basis_hint.iter().filter(|h| h.is_none()).count();
    let width = cols + n_art + 1;
    let mut t = vec![0.0; rows * width];
    let mut basis = vec![0usize; rows];
    let mut art_rows = Vec::with_capacity(n_art);
    let mut next_art = cols;
    for i in 0..rows {
        let src = &a[i * cols..(i + 1) * cols];
        let dst = &mut t[i * width..(i + 1) * width];
        dst[..cols].copy_from_slice(src);
        dst[width - 1] = b[i];
        match basis_hint[i] {
            Some(j) => {
                let p = dst[j];
                if p != 1.0 {
                    for x in dst.iter_mut() {
                        *x /= p;
                    }
                }
                basis[i] = j;
            }
            None => {
                dst[next_art] = 1.0;
                basis[i] = next_art;
                art_rows.push(i);
                next_art += 1;
            }
        }
    }
    let mut tab = Tableau {
        rows,
        cols,
        width,
        t,
        d: vec![0.0; width],
        basis,
        iterations: 0,
        max_iterations: 50_000 + 50 * (rows + width),
    };

    if n_art > 0 {
        for j in cols..width - 1 {
            tab.d[j] = 1.0;
        }
        for i in 0..rows {
            if tab.basis[i] >= cols {
                for j in 0..width {
                    tab.d[j] -= tab.t[i * width + j];
                }
                tab.d[tab.basis[i]] = 0.0;
            }
        }
        tab.iterate(width - 1)?;
        let scale = 1.0 + b.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let infeasibility = -tab.d[width - 1];
        if infeasibility > PHASE1_TOL * scale {
            return Ok(Outcome::Infeasible);
        }
        // Drive zero-valued artificials out of the basis where possible.
        for i in 0..rows {
            if tab.basis[i] < cols {
                continue;
            }
            let mut best: Option<(usize, f64)> = None;
            for j in 0..cols {
                let v = tab.t[i * width + j].abs();
                if v > 1e-7 && best.is_none_or(|(_, bv)| v > bv) {
                    best = Some((j, v));
                }
            }
            if let Some((j, _)) = best {
                tab.pivot(i, j);
            }
            // Otherwise the row is redundant; its artificial stays basic at 0
            // and no artificial column may re-enter.
            tab.t[i * width + width - 1] = tab.t[i * width + width - 1].max(0.0);
        }
    }

    // Phase two reduced costs.
    tab.d.iter_mut().for_each(|x| *x = 0.0);
    tab.d[..cols].copy_from_slice(&c);
    for i in 0..rows {
        let bi = tab.basis[i];
        let cb = if bi < cols { c[bi] } else { 0.0 };
        if cb != 0.0 {
            for j in 0..width {
                tab.d[j] -= cb * tab.t[i * width + j];
            }
        }
    }
    for i in 0..rows {
        let bi = tab.basis[i];
        tab.d[bi] = 0.0;
    }
    if !tab.iterate(tab.cols)? {
        return Ok(Outcome::Unbounded);
    }
    let mut x = vec![0.0; cols];
    for i in 0..rows {
        let bi = tab.basis[i];
        if bi < cols {
            x[bi] = tab.rhs(i).max(0.0);
        }
    }
    Ok(Outcome::Optimal(Basis {
        x,
        basis: tab.basis,
        art_rows,
    }))
}
