//! Three-by-three confusion matrix of predicted versus actual comparisons.

use std::ops::AddAssign;

use serde::{Deserialize, Serialize};

use crate::dominance::Verdict;

/// Ground truth for a pair `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Truth {
    Better,
    Worse,
    Unknown,
}

impl Truth {
    pub fn from_ratings(ra: u32, rb: u32) -> Self {
        match ra.cmp(&rb) {
            std::cmp::Ordering::Greater => Truth::Better,
            std::cmp::Ordering::Less => Truth::Worse,
            std::cmp::Ordering::Equal => Truth::Unknown,
        }
    }
}

/// Counts indexed by (prediction, truth): `bw` counts "predicted better,
/// actually worse".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub bb: u64,
    pub bw: u64,
    pub bu: u64,
    pub wb: u64,
    pub ww: u64,
    pub wu: u64,
    pub ub: u64,
    pub uw: u64,
    pub uu: u64,
}

impl ConfusionMatrix {
    pub fn add(&mut self, predicted: Verdict, truth: Truth) {
        use Truth as T;
        use Verdict as V;
        let cell = match (predicted, truth) {
            (V::LeftBetter, T::Better) => &mut self.bb,
            (V::LeftBetter, T::Worse) => &mut self.bw,
            (V::LeftBetter, T::Unknown) => &mut self.bu,
            (V::RightBetter, T::Better) => &mut self.wb,
            (V::RightBetter, T::Worse) => &mut self.ww,
            (V::RightBetter, T::Unknown) => &mut self.wu,
            (V::Unknown, T::Better) => &mut self.ub,
            (V::Unknown, T::Worse) => &mut self.uw,
            (V::Unknown, T::Unknown) => &mut self.uu,
        };
        *cell += 1;
    }

    pub fn total(&self) -> u64 {
        self.cells().iter().sum()
    }

    /// Cells in the order bb, bw, bu, wb, ww, wu, ub, uw, uu.
    pub fn cells(&self) -> [u64; 9] {
        [
            self.bb, self.bw, self.bu, self.wb, self.ww, self.wu, self.ub, self.uw, self.uu,
        ]
    }

    pub fn scores(&self) -> Scores {
        scores(self)
    }
}

impl AddAssign for ConfusionMatrix {
    fn add_assign(&mut self, o: Self) {
        self.bb += o.bb;
        self.bw += o.bw;
        self.bu += o.bu;
        self.wb += o.wb;
        self.ww += o.ww;
        self.wu += o.wu;
        self.ub += o.ub;
        self.uw += o.uw;
        self.uu += o.uu;
    }
}

pub fn tally<I: IntoIterator<Item = (Verdict, Truth)>>(predictions: I) -> ConfusionMatrix {
    let mut m = ConfusionMatrix::default();
    for (v, t) in predictions {
        m.add(v, t);
    }
    m
}

/// Precision, recall, F1, prediction correctness and prediction rate;
/// `None` where a denominator vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Scores {
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
    pub correctness: Option<f64>,
    pub prediction_rate: Option<f64>,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn scores(m: &ConfusionMatrix) -> Scores {
    let hit = m.bb + m.ww;
    let wrong = m.bw + m.wb;
    let precision = ratio(hit, hit + wrong + m.bu + m.wu);
    let recall = ratio(hit, hit + wrong + m.ub + m.uw);
    let f1 = match (precision, recall) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        (Some(_), Some(_)) => Some(0.0),
        _ => None,
    };
    let total = m.total();
    Scores {
        precision,
        recall,
        f1,
        correctness: ratio(hit, hit + wrong),
        prediction_rate: (total > 0).then(|| 1.0 - (m.ub + m.uw + m.uu) as f64 / total as f64),
    }
}

/// Mean of the defined values, `None` if there are none.
pub fn mean_defined<I: IntoIterator<Item = Option<f64>>>(values: I) -> Option<f64> {
    let (sum, count) = values
        .into_iter()
        .flatten()
        .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}
