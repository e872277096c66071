//! Minimum model degree through the subset-counting kernel.
//!
//! A preference set is representable at degree τ iff the strict system
//! `(A→_τ − B→_τ)·v ≥ 1` is feasible, i.e. iff the origin lies outside the
//! convex hull of the difference vectors. That distance is computed with
//! Wolfe's minimum-norm-point method working on the Gram matrix only, so the
//! exponentially long augmented vectors are never formed.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::{Alternative, PreferenceSet, MAX_FEATURES};

/// Squared distances below this count as "origin in the hull".
pub const EPS_SEP: f64 = 1e-8;

/// `C(k, i)` for `k, i ≤ 20`.
pub fn binomial(k: usize, i: usize) -> u64 {
    if i > k {
        return 0;
    }
    let i = i.min(k - i);
    let mut c = 1u64;
    for j in 0..i {
        c = c * (k - j) as u64 / (j + 1) as u64;
    }
    c
}

/// `K^τ(x, y) = Σ_{i=1..τ} C(|x∩y|, i)`, the number of non-empty subsets
/// of `x ∩ y` with at most `τ` elements.
pub fn kernel(x: Alternative, y: Alternative, tau: usize, n: usize) -> Result<u64> {
    if tau == 0 || tau > n || n > MAX_FEATURES {
        return Err(Error::DegreeOutOfRange { tau, n });
    }
    let k = x.intersection(y).len();
    Ok((1..=tau.min(k)).map(|i| binomial(k, i)).sum())
}

/// Gram matrix of the difference vectors `A→_τ − B→_τ` over the pairs of a
/// preference set, updated in place as τ grows.
#[derive(Debug, Clone)]
pub struct GramTable {
    m: usize,
    tau: usize,
    /// Row-major `m x m`.
    q: Vec<f64>,
    /// Per cell: |A_i∩A_j|, |A_i∩B_j|, |B_i∩A_j|, |B_i∩B_j|.
    inter: Vec<[u8; 4]>,
}

impl GramTable {
    /// The table at τ = 1.
    pub fn new(r: &PreferenceSet) -> Self {
        let pairs = r.essential_pairs();
        let pairs = &pairs[..];
        let m = pairs.len();
        let mut inter = Vec::with_capacity(m * m);
        for &(a, b) in pairs {
            for &(c, d) in pairs {
                inter.push([
                    a.intersection(c).len() as u8,
                    a.intersection(d).len() as u8,
                    b.intersection(c).len() as u8,
                    b.intersection(d).len() as u8,
                ]);
            }
        }
        let q = inter
            .iter()
            .map(|k| k[0] as f64 - k[1] as f64 - k[2] as f64 + k[3] as f64)
            .collect();
        GramTable { m, tau: 1, q, inter }
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.q[i * self.m + j]
    }

    /// Moves to degree τ + 1 by adding the size-(τ+1) binomial terms.
    pub fn advance(&mut self) {
        let t = self.tau + 1;
        for (q, k) in self.q.iter_mut().zip(&self.inter) {
            *q += binomial(k[0] as usize, t) as f64
                - binomial(k[1] as usize, t) as f64
                - binomial(k[2] as usize, t) as f64
                + binomial(k[3] as usize, t) as f64;
        }
        self.tau = t;
    }

    /// Squared distance from the origin to the hull of the difference
    /// vectors.
    pub fn min_norm_sq(&self) -> f64 {
        min_norm_sq(&self.q, self.m)
    }

    pub fn separable(&self) -> bool {
        self.m == 0 || self.min_norm_sq() > EPS_SEP
    }
}

/// Wolfe's minimum-norm-point algorithm over points known only through
/// their Gram matrix `q` (`m x m`, row-major). Returns `min λᵀqλ` over the
/// probability simplex.
pub fn min_norm_sq(q: &[f64], m: usize) -> f64 {
    if m == 0 {
        return f64::INFINITY;
    }
    let diag_max = (0..m).map(|i| q[i * m + i]).fold(0.0f64, f64::max);
    let gap_tol = 1e-12 * diag_max.max(1.0);
    let zero_tol = 1e-14 * diag_max.max(1.0);

    let start = (0..m)
        .min_by(|&i, &j| q[i * m + i].total_cmp(&q[j * m + j]))
        .unwrap();
    let mut corral = vec![start];
    let mut w = vec![1.0];
    let mut g = vec![0.0; m];
    let max_major = 50 * m + 1000;

    for _ in 0..max_major {
        // g_j = x·d_j with x = Σ w_k d_k.
        for (j, gj) in g.iter_mut().enumerate() {
            *gj = corral.iter().zip(&w).map(|(&k, &wk)| wk * q[k * m + j]).sum();
        }
        let xx: f64 = corral.iter().zip(&w).map(|(&k, &wk)| wk * g[k]).sum();
        if xx <= zero_tol {
            return xx.max(0.0);
        }
        let (jmin, gmin) = g
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(j, &v)| (j, v))
            .unwrap();
        if xx - gmin <= gap_tol || corral.contains(&jmin) {
            return xx;
        }
        corral.push(jmin);
        w.push(0.0);

        loop {
            let alpha = affine_minimizer(q, m, &corral);
            if alpha.iter().all(|&a| a > 1e-15) {
                w = alpha;
                break;
            }
            let mut theta = 1.0f64;
            for (&wi, &ai) in w.iter().zip(&alpha) {
                if ai <= 1e-15 && wi - ai > 0.0 {
                    theta = theta.min(wi / (wi - ai));
                }
            }
            for (wi, &ai) in w.iter_mut().zip(&alpha) {
                *wi = (1.0 - theta) * *wi + theta * ai;
            }
            let mut k = 0;
            let mut removed = false;
            while k < corral.len() {
                if w[k] <= 1e-15 {
                    corral.swap_remove(k);
                    w.swap_remove(k);
                    removed = true;
                } else {
                    k += 1;
                }
            }
            if !removed {
                // Numerical stall: drop the smallest weight.
                let (kmin, _) = w
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.total_cmp(b.1))
                    .unwrap();
                corral.swap_remove(kmin);
                w.swap_remove(kmin);
            }
            let s: f64 = w.iter().sum();
            w.iter_mut().for_each(|x| *x /= s);
        }
    }
    let xx: f64 = corral
        .iter()
        .zip(&w)
        .map(|(&k, &wk)| wk * corral.iter().zip(&w).map(|(&l, &wl)| wl * q[k * m + l]).sum::<f64>())
        .sum();
    xx.max(0.0)
}

/// Weights of the point of minimum norm in the affine hull of `corral`.
fn affine_minimizer(q: &[f64], m: usize, corral: &[usize]) -> Vec<f64> {
    let s = corral.len();
    let mut a = DMatrix::<f64>::zeros(s + 1, s + 1);
    for (r, &i) in corral.iter().enumerate() {
        for (c, &j) in corral.iter().enumerate() {
            a[(r, c)] = q[i * m + j];
        }
        a[(r, s)] = 1.0;
        a[(s, r)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(s + 1);
    b[s] = 1.0;
    let sol = match a.clone().lu().solve(&b) {
        Some(x) if x.iter().all(|v| v.is_finite()) => x,
        _ => a
            .svd(true, true)
            .solve(&b, 1e-12)
            .unwrap_or_else(|_| DVector::from_element(s + 1, 1.0 / s as f64)),
    };
    let mut alpha: Vec<f64> = sol.iter().take(s).copied().collect();
    let total: f64 = alpha.iter().sum();
    if total.abs() > 1e-300 {
        alpha.iter_mut().for_each(|x| *x /= total);
    }
    alpha
}

/// Whether some model of degree at most `tau` represents `r`.
pub fn feasible_at_degree(r: &PreferenceSet, tau: usize) -> Result<bool> {
    let n = r.n();
    if tau == 0 || tau > n {
        return Err(Error::DegreeOutOfRange { tau, n });
    }
    let mut gram = GramTable::new(r);
    while gram.tau() < tau {
        gram.advance();
    }
    Ok(gram.separable())
}

/// Smallest τ at which `r` is representable; 0 for an empty set.
pub fn min_degree(r: &PreferenceSet) -> Result<usize> {
    if r.is_empty() {
        return Ok(0);
    }
    let mut gram = GramTable::new(r);
    loop {
        if gram.separable() {
            return Ok(gram.tau());
        }
        if gram.tau() == r.n() {
            return Err(Error::InconsistentPreferences);
        }
        gram.advance();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(20, 10), 184_756);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(0, 0), 1);
    }

    #[test]
    fn min_norm_of_known_hulls() {
        // Points (1,0) and (0,1): nearest hull point (1/2, 1/2).
        let q = [1.0, 0.0, 0.0, 1.0];
        assert!((min_norm_sq(&q, 2) - 0.5).abs() < 1e-12);
        // Points 1 and -1 on a line: origin inside.
        let q = [1.0, -1.0, -1.0, 1.0];
        assert!(min_norm_sq(&q, 2) < 1e-12);
        // (2,0), (0,2), (1,1): min at (1,1), norm² 2.
        let q = [4.0, 0.0, 2.0, 0.0, 4.0, 2.0, 2.0, 2.0, 2.0];
        assert!((min_norm_sq(&q, 3) - 2.0).abs() < 1e-12);
    }
}
