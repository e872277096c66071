use crate::lp::{solve_with_bounds, LinearProgram, SolveResult, SolveStatus};
use crate::SolverError;

/// A linear program in which some variables must take values in `{0, 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedProgram {
    lp: LinearProgram,
    binaries: Vec<usize>,
}

#[derive(Debug, Clone, Copy)]
pub struct MipOptions {
    pub node_limit: usize,
    pub integrality_tol: f64,
}

impl Default for MipOptions {
    fn default() -> Self {
        MipOptions {
            node_limit: 1_000_000,
            integrality_tol: 1e-9,
        }
    }
}

impl MixedProgram {
    /// Wraps `lp`, declaring `binaries` as `{0,1}` variables. Their bounds
    /// in the relaxation are clamped to `[0, 1]`.
    pub fn new(mut lp: LinearProgram, mut binaries: Vec<usize>) -> Result<Self, SolverError> {
        binaries.sort_unstable();
        binaries.dedup();
        for &j in &binaries {
            if j >= lp.num_variables() {
                return Err(SolverError::InvalidBinary(j));
            }
            let (lo, hi) = lp.bounds(j);
            let (lo, hi) = (lo.max(0.0).ceil(), hi.min(1.0).floor());
            if lo > hi {
                return Err(SolverError::InvalidBinary(j));
            }
            lp.set_bounds(j, lo, hi);
        }
        Ok(MixedProgram { lp, binaries })
    }

    pub fn relaxation(&self) -> &LinearProgram {
        &self.lp
    }

    pub fn binaries(&self) -> &[usize] {
        &self.binaries
    }

    /// True when every feasible objective value is an integer: only
    /// binaries carry cost, with integral coefficients.
    fn integral_objective(&self) -> bool {
        let mut is_binary = vec![false; self.lp.num_variables()];
        for &j in &self.binaries {
            is_binary[j] = true;
        }
        self.lp
            .objective()
            .iter()
            .enumerate()
            .all(|(j, &c)| c == 0.0 || (is_binary[j] && c.fract() == 0.0))
    }
}

struct Node {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

/// Depth-first branch-and-bound over the binaries of `mp`, branching on the
/// most fractional one and pruning nodes whose relaxation bound cannot
/// improve the incumbent.
pub fn solve_mip(mp: &MixedProgram, opts: &MipOptions) -> Result<SolveResult, SolverError> {
    let lp = &mp.lp;
    lp.validate()?;
    let integral = mp.integral_objective();
    let n = lp.num_variables();
    let (lower, upper): (Vec<f64>, Vec<f64>) = (0..n).map(|j| lp.bounds(j)).unzip();

    let mut stack = vec![Node { lower, upper }];
    let mut incumbent: Option<SolveResult> = None;
    let mut nodes = 0usize;

    while let Some(node) = stack.pop() {
        nodes += 1;
        if nodes > opts.node_limit {
            return Err(SolverError::NodeLimit(opts.node_limit));
        }
        let relaxed = solve_with_bounds(lp, &node.lower, &node.upper)?;
        match relaxed.status {
            SolveStatus::Infeasible => continue,
            SolveStatus::Unbounded => {
                // Binaries are bounded, so the continuous part is unbounded
                // at any completion of this node.
                return Ok(relaxed);
            }
            SolveStatus::Optimal => {}
        }
        if let Some(best) = &incumbent {
            let prune = if integral {
                (relaxed.value - 1e-6).ceil() >= best.value - 0.5
            } else {
                relaxed.value >= best.value - 1e-9
            };
            if prune {
                continue;
            }
        }

        let mut branch: Option<(usize, f64)> = None;
        let mut best_frac = opts.integrality_tol;
        for &j in &mp.binaries {
            let v = relaxed.point[j];
            let frac = (v - v.floor()).min(v.ceil() - v);
            if frac > best_frac {
                best_frac = frac;
                branch = Some((j, v));
            }
        }

        match branch {
            None => {
                let mut point = relaxed.point;
                for &j in &mp.binaries {
                    point[j] = point[j].round();
                }
                let value = if integral {
                    lp.objective_value(&point).round()
                } else {
                    lp.objective_value(&point)
                };
                incumbent = Some(SolveResult {
                    status: SolveStatus::Optimal,
                    value,
                    point,
                });
            }
            Some((j, v)) => {
                let mut down = Node {
                    lower: node.lower.clone(),
                    upper: node.upper.clone(),
                };
                down.upper[j] = 0.0;
                let mut up = node;
                up.lower[j] = 1.0;
                // The child nearest the relaxed value is explored first.
                if v >= 0.5 {
                    stack.push(down);
                    stack.push(up);
                } else {
                    stack.push(up);
                    stack.push(down);
                }
            }
        }
    }
    Ok(incumbent.unwrap_or_else(SolveResult::infeasible))
}
