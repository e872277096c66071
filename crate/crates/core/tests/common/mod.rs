#![allow(dead_code)]

use rand::seq::index;
use rand::Rng;
use robord_core::datagen::{rng_from_seed, sample_train_split_with, sample_user_with, GenConfig, Rng64};
use robord_core::{derive_preferences, CollisionPolicy, PreferenceSet, RatedDataset, Subset};

pub fn rng(seed: u64) -> Rng64 {
    rng_from_seed(seed)
}

/// `k` distinct alternatives with ratings drawn from `1..=levels`.
pub fn random_ratings(rng: &mut Rng64, n: usize, k: usize, levels: u32) -> RatedDataset {
    let items = index::sample(rng, 1 << n, k.min(1 << n))
        .into_iter()
        .map(|b| (Subset::from_bits(b as u32), rng.random_range(1..=levels)))
        .collect();
    RatedDataset::new(n, levels, items).unwrap()
}

/// A consistent preference set: the strict part of random ratings.
pub fn random_ranked(rng: &mut Rng64, n: usize, k: usize, levels: u32) -> PreferenceSet {
    let data = random_ratings(rng, n, k, levels);
    derive_preferences(&data, CollisionPolicy::Error).unwrap().preferences
}

/// Arbitrary pairs, possibly cyclic, never containing both orientations.
pub fn random_pairs(rng: &mut Rng64, n: usize, m: usize) -> PreferenceSet {
    let mut pairs = Vec::new();
    let mut tries = 0;
    while pairs.len() < m && tries < 50 * m + 50 {
        tries += 1;
        let a = Subset::from_bits(rng.random_range(0..1u32 << n));
        let b = Subset::from_bits(rng.random_range(0..1u32 << n));
        if a == b || pairs.contains(&(a, b)) || pairs.contains(&(b, a)) {
            continue;
        }
        pairs.push((a, b));
    }
    PreferenceSet::new(n, pairs).unwrap()
}

/// Preferences of a synthetic user over `k` sampled alternatives.
pub fn synthetic(rng: &mut Rng64, n: usize, alpha: f64, k: usize) -> PreferenceSet {
    let cfg = GenConfig {
        n,
        alpha,
        t: 6,
        ..GenConfig::default()
    };
    let user = sample_user_with(&cfg, rng).unwrap();
    let data = sample_train_split_with(&user, k.min(1 << n), rng).unwrap();
    derive_preferences(&data, CollisionPolicy::Error).unwrap().preferences
}

pub fn random_alt(rng: &mut Rng64, n: usize) -> Subset {
    Subset::from_bits(rng.random_range(0..1u32 << n))
}
