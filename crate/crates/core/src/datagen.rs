//! Synthetic users: a random θ-additive utility and its bucketed ratings.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Alternative, Model, RatedDataset, Subset, ValueFunction, MAX_FEATURES};

/// The portable generator used for every random draw.
pub type Rng64 = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    pub n: usize,
    pub alpha: f64,
    pub p: f64,
    pub sigma: f64,
    pub t: u32,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            n: 8,
            alpha: 0.1,
            p: 0.9,
            sigma: 100.0,
            t: 12,
            seed: 0,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.n == 0 || self.n > MAX_FEATURES {
            return bad("n must lie in 1..=20");
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return bad("alpha must lie in [0, 1]");
        }
        if !(self.p > 0.0 && self.p <= 1.0) {
            return bad("p must lie in (0, 1]");
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return bad("sigma must be positive");
        }
        if self.t < 2 {
            return bad("t must be at least 2");
        }
        Ok(())
    }

    /// Number of subsets added to the singletons: `⌊α(2^n − n)⌋`, capped
    /// at the number of non-singleton subsets.
    pub fn extra_subsets(&self) -> usize {
        let n = self.n;
        let avail = (1usize << n) - n - 1;
        let wanted = (self.alpha * ((1usize << n) - n) as f64).floor() as usize;
        wanted.min(avail)
    }
}

/// `E|S|` of a grown subset.
pub fn expected_subset_size(n: usize, p: f64) -> f64 {
    2.0 + (1.0 - p - (1.0 - p).powi(n as i32 - 1)) / p
}

/// Grows one subset: a uniform singleton, then uniform new attributes, each
/// addition followed by a stop with probability `p` (or when `S = F`).
pub fn grow_subset<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Subset {
    let mut s = Subset::singleton(rng.random_range(0..n));
    if n == 1 {
        return s;
    }
    loop {
        let missing: Vec<usize> = (0..n).filter(|&i| !s.contains(i)).collect();
        s = s.with(missing[rng.random_range(0..missing.len())]);
        if s.len() == n || rng.random_bool(p) {
            return s;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticUser {
    pub n: usize,
    pub model: Model,
    pub values: ValueFunction,
    /// `v_0 < … < v_t` (all equal when the utility is constant).
    pub thresholds: Vec<f64>,
}

pub fn sample_user(cfg: &GenConfig) -> Result<SyntheticUser> {
    sample_user_with(cfg, &mut rng_from_seed(cfg.seed))
}

pub fn sample_user_with<R: Rng + ?Sized>(cfg: &GenConfig, rng: &mut R) -> Result<SyntheticUser> {
    cfg.validate()?;
    let n = cfg.n;
    let mut model = Model::singletons(n);
    let target = n + cfg.extra_subsets();
    while model.card() < target {
        let s = grow_subset(n, cfg.p, rng);
        model.insert(s)?;
    }
    let normal = Normal::new(0.0, cfg.sigma).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let values = ValueFunction::new(model.subsets().map(|s| (s, normal.sample(rng))).collect::<Vec<_>>());
    let mut user = SyntheticUser {
        n,
        model,
        values,
        thresholds: Vec::new(),
    };
    let (lo, hi) = (0u32..1 << n)
        .map(|b| user.score(Subset::from_bits(b)))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), f| (lo.min(f), hi.max(f)));
    let t = cfg.t as usize;
    user.thresholds = (0..=t)
        .map(|k| if k == t { hi } else { lo + (hi - lo) * k as f64 / t as f64 })
        .collect();
    Ok(user)
}

impl SyntheticUser {
    pub fn score(&self, a: Alternative) -> f64 {
        self.values.score(a)
    }

    pub fn scale(&self) -> u32 {
        (self.thresholds.len() - 1) as u32
    }

    /// `min{k ≥ 1 : f(a) ≤ v_k}`.
    pub fn rate(&self, a: Alternative) -> u32 {
        let f = self.score(a);
        let t = self.thresholds.len() - 1;
        (1..=t).find(|&k| f <= self.thresholds[k]).unwrap_or(t) as u32
    }

    /// Every alternative with its rating, by bit value.
    pub fn full_dataset(&self) -> RatedDataset {
        let items = (0u32..1 << self.n)
            .map(|b| {
                let a = Subset::from_bits(b);
                (a, self.rate(a))
            })
            .collect();
        RatedDataset::new(self.n, self.scale(), items).expect("ratings within scale")
    }
}

pub fn rate(user: &SyntheticUser, a: Alternative) -> u32 {
    user.rate(a)
}

pub fn sample_train_split(user: &SyntheticUser, k: usize, seed: u64) -> Result<RatedDataset> {
    sample_train_split_with(user, k, &mut rng_from_seed(seed))
}

/// `k` distinct alternatives drawn uniformly without replacement.
pub fn sample_train_split_with<R: Rng + ?Sized>(user: &SyntheticUser, k: usize, rng: &mut R) -> Result<RatedDataset> {
    let total = 1usize << user.n;
    if k > total {
        return Err(Error::InsufficientData(format!("k = {k} exceeds 2^{} alternatives", user.n)));
    }
    let items = index::sample(rng, total, k)
        .into_iter()
        .map(|i| {
            let a = Subset::from_bits(i as u32);
            (a, user.rate(a))
        })
        .collect();
    RatedDataset::new(user.n, user.scale(), items)
}
