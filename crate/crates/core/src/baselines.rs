//! Comparison learners over augmented binary vectors: least squares on
//! normalized ratings, a bias-free linear SVM on difference vectors, and
//! distance-weighted nearest neighbours.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dominance::Verdict;
use crate::error::{Error, Result};
use crate::model::{subsets_up_to, Alternative, PreferenceSet, RatedDataset, Subset};

pub const RIDGE: f64 = 1e-8;
pub const DEFAULT_K: usize = 5;

/// `(I_a(S_1), …, I_a(S_m))` over `subsets`.
pub fn augmented(a: Alternative, subsets: &[Subset]) -> Vec<f64> {
    subsets.iter().map(|s| s.is_subset_of(a) as u8 as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaselineKind {
    Lr,
    Svm,
    Knn,
}

impl BaselineKind {
    pub fn name(self) -> &'static str {
        match self {
            BaselineKind::Lr => "lr",
            BaselineKind::Svm => "svm",
            BaselineKind::Knn => "knn",
        }
    }
}

/// How the ratings of the nearest neighbours are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KnnRule {
    /// Inverse-distance weighted mean rating.
    #[default]
    Mean,
    /// The rating with the largest total inverse-distance weight, smallest
    /// rating first on ties (a nearest-neighbour classifier).
    Vote,
}

#[derive(Debug, Clone, PartialEq)]
enum State {
    Linear(Vec<f64>),
    Neighbours {
        k: usize,
        rule: KnnRule,
        train: Vec<(Vec<f64>, f64)>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselinePredictor {
    kind: BaselineKind,
    subsets: Vec<Subset>,
    state: State,
}

fn universe(n: usize, deg: usize) -> Vec<Subset> {
    subsets_up_to(n, deg.max(1))
}

impl BaselinePredictor {
    pub fn kind(&self) -> BaselineKind {
        self.kind
    }

    pub fn subsets(&self) -> &[Subset] {
        &self.subsets
    }

    /// Learned weights of the linear models.
    pub fn weights(&self) -> Option<&[f64]> {
        match &self.state {
            State::Linear(w) => Some(w),
            State::Neighbours { .. } => None,
        }
    }

    /// Fitted utility (LR, SVM) or predicted rating (KNN).
    pub fn score(&self, a: Alternative) -> f64 {
        match &self.state {
            State::Linear(w) => self
                .subsets
                .iter()
                .zip(w)
                .filter(|(s, _)| s.is_subset_of(a))
                .map(|(_, w)| w)
                .sum(),
            State::Neighbours { k, rule, train } => knn_rating(&augmented(a, &self.subsets), train, *k, *rule),
        }
    }

    /// Signed comparison of `a` against `b`; antisymmetric for the linear
    /// models.
    pub fn decision(&self, a: Alternative, b: Alternative) -> f64 {
        match &self.state {
            State::Linear(w) => self
                .subsets
                .iter()
                .zip(w)
                .map(|(s, w)| w * (s.is_subset_of(a) as u8 as f64 - s.is_subset_of(b) as u8 as f64))
                .sum(),
            State::Neighbours { .. } => self.score(a) - self.score(b),
        }
    }

    pub fn predict(&self, a: Alternative, b: Alternative) -> Verdict {
        let d = match &self.state {
            State::Linear(_) => self.decision(a, b),
            State::Neighbours { .. } => {
                let (sa, sb) = (self.score(a), self.score(b));
                if sa > sb {
                    1.0
                } else if sa < sb {
                    -1.0
                } else {
                    0.0
                }
            }
        };
        if d > 0.0 {
            Verdict::LeftBetter
        } else if d < 0.0 {
            Verdict::RightBetter
        } else {
            Verdict::Unknown
        }
    }
}

/// Least squares on ratings rescaled to `[0, 1]`, without intercept.
pub fn fit_lr(data: &RatedDataset, deg: usize) -> Result<BaselinePredictor> {
    if data.is_empty() {
        return Err(Error::InsufficientData("least squares needs at least one item".into()));
    }
    let subsets = universe(data.n(), deg);
    let d = subsets.len();
    let (lo, hi) = data
        .items()
        .iter()
        .fold((u32::MAX, 0), |(lo, hi), &(_, r)| (lo.min(r), hi.max(r)));
    let target = |r: u32| if hi > lo { (r - lo) as f64 / (hi - lo) as f64 } else { 0.0 };
    let x = DMatrix::from_row_iterator(
        data.len(),
        d,
        data.items().iter().flat_map(|&(a, _)| augmented(a, &subsets)),
    );
    let y = DVector::from_iterator(data.len(), data.items().iter().map(|&(_, r)| target(r)));
    let xtx = x.transpose() * &x;
    let xty = x.transpose() * y;
    let w = least_squares(xtx, &xty);
    Ok(BaselinePredictor {
        kind: BaselineKind::Lr,
        subsets,
        state: State::Linear(w.iter().copied().collect()),
    })
}

/// Solves the normal equations, adding a small ridge term when the Gram
/// matrix is singular.
fn least_squares(xtx: DMatrix<f64>, xty: &DVector<f64>) -> DVector<f64> {
    let d = xtx.nrows();
    let scale = (0..d).map(|i| xtx[(i, i)]).fold(0.0f64, f64::max).max(1.0);
    if let Some(ch) = xtx.clone().cholesky() {
        let l = ch.l_dirty();
        let min_pivot = (0..d).map(|i| l[(i, i)] * l[(i, i)]).fold(f64::INFINITY, f64::min);
        if min_pivot > 1e-10 * scale {
            return ch.solve(xty);
        }
    }
    let ridged = xtx + DMatrix::identity(d, d) * RIDGE;
    match ridged.clone().cholesky() {
        Some(ch) => ch.solve(xty),
        None => ridged
            .svd(true, true)
            .solve(xty, 1e-14)
            .unwrap_or_else(|_| DVector::zeros(d)),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SvmOptions {
    pub c: f64,
    pub max_epochs: usize,
    pub tol: f64,
}

impl Default for SvmOptions {
    fn default() -> Self {
        SvmOptions {
            c: 1.0,
            max_epochs: 10_000,
            tol: 1e-6,
        }
    }
}

pub fn fit_svm(r: &PreferenceSet, deg: usize) -> Result<BaselinePredictor> {
    fit_svm_with(r, deg, &SvmOptions::default())
}

/// Hinge-loss linear classifier without bias: every pair `(A, B)` yields
/// `A→ − B→` labelled positive and `B→ − A→` labelled negative. Solved by
/// dual coordinate descent.
pub fn fit_svm_with(r: &PreferenceSet, deg: usize, opts: &SvmOptions) -> Result<BaselinePredictor> {
    if r.is_empty() {
        return Err(Error::InsufficientData("SVM needs at least one preference".into()));
    }
    let subsets = universe(r.n(), deg);
    let d = subsets.len();
    // Examples y_i x_i; both orientations of a pair give the same product.
    let mut examples: Vec<Vec<f64>> = Vec::with_capacity(2 * r.len());
    for &(a, b) in r.pairs() {
        let diff: Vec<f64> = augmented(a, &subsets)
            .iter()
            .zip(augmented(b, &subsets))
            .map(|(x, y)| x - y)
            .collect();
        examples.push(diff.clone());
        examples.push(diff);
    }
    let qd: Vec<f64> = examples.iter().map(|x| x.iter().map(|v| v * v).sum()).collect();
    let mut alpha = vec![0.0; examples.len()];
    let mut w = vec![0.0; d];
    for _ in 0..opts.max_epochs {
        let mut pg_max = f64::NEG_INFINITY;
        let mut pg_min = f64::INFINITY;
        for (i, x) in examples.iter().enumerate() {
            let g: f64 = x.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() - 1.0;
            let pg = if alpha[i] == 0.0 {
                g.min(0.0)
            } else if alpha[i] == opts.c {
                g.max(0.0)
            } else {
                g
            };
            pg_max = pg_max.max(pg);
            pg_min = pg_min.min(pg);
            if pg != 0.0 {
                let old = alpha[i];
                alpha[i] = (old - g / qd[i]).clamp(0.0, opts.c);
                let delta = alpha[i] - old;
                for (wj, xj) in w.iter_mut().zip(x) {
                    *wj += delta * xj;
                }
            }
        }
        if pg_max - pg_min <= opts.tol {
            break;
        }
    }
    Ok(BaselinePredictor {
        kind: BaselineKind::Svm,
        subsets,
        state: State::Linear(w),
    })
}

/// Nearest neighbours on augmented vectors: the prediction is the
/// inverse-distance weighted mean rating of the `k` closest items.
pub fn fit_knn(data: &RatedDataset, deg: usize, k: usize) -> Result<BaselinePredictor> {
    fit_knn_with(data, deg, k, KnnRule::Mean)
}

pub fn fit_knn_with(data: &RatedDataset, deg: usize, k: usize, rule: KnnRule) -> Result<BaselinePredictor> {
    if k == 0 || k > data.len() {
        return Err(Error::InsufficientData(format!(
            "k = {k} with {} training items",
            data.len()
        )));
    }
    let subsets = universe(data.n(), deg);
    let train = data
        .items()
        .iter()
        .map(|&(a, r)| (augmented(a, &subsets), r as f64))
        .collect();
    Ok(BaselinePredictor {
        kind: BaselineKind::Knn,
        subsets,
        state: State::Neighbours { k, rule, train },
    })
}

fn knn_rating(x: &[f64], train: &[(Vec<f64>, f64)], k: usize, rule: KnnRule) -> f64 {
    let mut dist: Vec<(f64, usize)> = train
        .iter()
        .enumerate()
        .map(|(i, (t, _))| {
            let d2: f64 = t.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
            (d2.sqrt(), i)
        })
        .collect();
    dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let exact: Vec<f64> = dist.iter().take_while(|(d, _)| *d == 0.0).map(|&(_, i)| train[i].1).collect();
    // Exact matches outweigh everything else.
    let weighted: Vec<(f64, f64)> = if exact.is_empty() {
        dist[..k].iter().map(|&(d, i)| (train[i].1, 1.0 / d)).collect()
    } else {
        exact.iter().map(|&r| (r, 1.0)).collect()
    };
    match rule {
        KnnRule::Mean => {
            let (num, den) = weighted.iter().fold((0.0, 0.0), |(num, den), &(r, w)| (num + r * w, den + w));
            num / den
        }
        KnnRule::Vote => {
            let mut votes: Vec<(f64, f64)> = Vec::new();
            for &(r, w) in &weighted {
                match votes.iter_mut().find(|(c, _)| *c == r) {
                    Some(v) => v.1 += w,
                    None => votes.push((r, w)),
                }
            }
            votes.sort_by(|a, b| a.0.total_cmp(&b.0));
            votes
                .iter()
                .fold((f64::NAN, f64::NEG_INFINITY), |best, &(r, w)| if w > best.1 { (r, w) } else { best })
                .0
        }
    }
}
