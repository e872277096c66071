//! Ground sets, alternatives, θ-additive models and preference data.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard cap on the number of features.
pub const MAX_FEATURES: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundSet {
    names: Vec<String>,
}

impl GroundSet {
    pub fn new(names: Vec<String>) -> Result<Self> {
        if names.is_empty() || names.len() > MAX_FEATURES {
            return Err(Error::GroundSetSize(names.len()));
        }
        let mut seen = HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateLabel(name.clone()));
            }
        }
        Ok(GroundSet { names })
    }

    /// Features labelled `a1..an`.
    pub fn anonymous(n: usize) -> Result<Self> {
        Self::new((1..=n).map(|i| format!("a{i}")).collect())
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn full(&self) -> Subset {
        Subset::full(self.n())
    }

    pub fn check(&self, a: Subset) -> Result<()> {
        check_within(a, self.n())
    }
}

pub(crate) fn check_within(a: Subset, n: usize) -> Result<()> {
    if n < 32 && a.0 >> n != 0 {
        return Err(Error::OutOfGroundSet { bits: a.0, n });
    }
    Ok(())
}

/// A subset of the ground set stored as its characteristic bit vector; bit
/// `i` stands for feature `a_{i+1}`.
///
/// The ordering is the canonical subset order used for every indexed
/// vector in the crate: by size, then lexicographically on the sorted
/// feature indices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(into = "Vec<usize>", try_from = "Vec<usize>")]
pub struct Subset(u32);

/// Alternatives and model elements share one representation.
pub type Alternative = Subset;

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_bits(bits: u32) -> Self {
        Subset(bits)
    }

    pub fn full(n: usize) -> Self {
        if n >= 32 {
            Subset(u32::MAX)
        } else {
            Subset((1u32 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        Subset(1 << i)
    }

    /// From zero-based feature indices.
    pub fn from_indices<I: IntoIterator<Item = usize>>(idx: I) -> Self {
        Subset(idx.into_iter().fold(0, |acc, i| acc | 1 << i))
    }

    /// From one-based feature numbers, as in `{a1, a3}`.
    pub fn of(features: &[usize]) -> Self {
        Self::from_indices(features.iter().map(|&i| i - 1))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn with(self, i: usize) -> Subset {
        Subset(self.0 | 1 << i)
    }

    /// Zero-based indices of the features present, ascending.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |&i| bits >> i & 1 == 1)
    }

    /// Bitstring of length `n`, character `i` standing for `a_{i+1}`.
    pub fn to_bitstring(self, n: usize) -> String {
        (0..n).map(|i| if self.contains(i) { '1' } else { '0' }).collect()
    }

    pub fn parse_bitstring(s: &str) -> Option<Subset> {
        if s.len() > 32 {
            return None;
        }
        let mut bits = 0u32;
        for (i, c) in s.chars().enumerate() {
            match c {
                '1' => bits |= 1 << i,
                '0' => {}
                _ => return None,
            }
        }
        Some(Subset(bits))
    }
}

impl Ord for Subset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.indices().cmp(other.indices()))
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.indices().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "a{}", i + 1)?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<Subset> for Vec<usize> {
    fn from(s: Subset) -> Self {
        s.indices().map(|i| i + 1).collect()
    }
}

impl TryFrom<Vec<usize>> for Subset {
    type Error = String;

    fn try_from(v: Vec<usize>) -> std::result::Result<Self, String> {
        if let Some(&bad) = v.iter().find(|&&i| i == 0 || i > 32) {
            return Err(format!("feature number {bad} out of range"));
        }
        Ok(Subset::of(&v))
    }
}

/// `I_A(S)`: 1 iff `s ⊆ a`.
pub fn indicator(s: Subset, a: Alternative) -> u8 {
    s.is_subset_of(a) as u8
}

/// All non-empty subsets of `{a1..an}` with at most `k` elements, in
/// canonical order.
pub fn subsets_up_to(n: usize, k: usize) -> Vec<Subset> {
    (1..=k.min(n))
        .flat_map(|size| (0..n).combinations(size).map(Subset::from_indices))
        .collect()
}

/// All `2^n` alternatives over `n` features, by bit value.
pub fn all_alternatives(n: usize) -> impl Iterator<Item = Subset> {
    (0u32..1 << n).map(Subset)
}

/// A θ-additive model: a set of distinct non-empty subsets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<Subset>", into = "Vec<Subset>")]
pub struct Model {
    subsets: BTreeSet<Subset>,
}

impl Model {
    pub fn new<I: IntoIterator<Item = Subset>>(subsets: I) -> Result<Self> {
        let subsets: BTreeSet<Subset> = subsets.into_iter().collect();
        if subsets.contains(&Subset::EMPTY) {
            return Err(Error::EmptySubset);
        }
        Ok(Model { subsets })
    }

    pub fn empty() -> Self {
        Model::default()
    }

    pub fn singletons(n: usize) -> Self {
        Model {
            subsets: (0..n).map(Subset::singleton).collect(),
        }
    }

    /// `[F]^k`: every subset of size at most `k`.
    pub fn up_to_degree(n: usize, k: usize) -> Self {
        Model {
            subsets: subsets_up_to(n, k).into_iter().collect(),
        }
    }

    pub fn subsets(&self) -> impl Iterator<Item = Subset> + '_ {
        self.subsets.iter().copied()
    }

    pub fn contains(&self, s: Subset) -> bool {
        self.subsets.contains(&s)
    }

    pub fn is_subset_of(&self, other: &Model) -> bool {
        self.subsets.is_subset(&other.subsets)
    }

    pub fn insert(&mut self, s: Subset) -> Result<bool> {
        if s.is_empty() {
            return Err(Error::EmptySubset);
        }
        Ok(self.subsets.insert(s))
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    pub fn deg(&self) -> usize {
        self.subsets.iter().map(|s| s.len()).max().unwrap_or(0)
    }

    pub fn card(&self) -> usize {
        self.subsets.len()
    }

    pub fn ws(&self) -> usize {
        self.subsets.iter().map(|s| s.len()).sum()
    }

    /// `(deg, card, ws)`, compared lexicographically.
    pub fn key(&self) -> (usize, usize, usize) {
        (self.deg(), self.card(), self.ws())
    }
}

impl TryFrom<Vec<Subset>> for Model {
    type Error = Error;

    fn try_from(v: Vec<Subset>) -> Result<Self> {
        Model::new(v)
    }
}

impl From<Model> for Vec<Subset> {
    fn from(m: Model) -> Self {
        m.subsets.into_iter().collect()
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, s) in self.subsets.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "}}")
    }
}

/// Values `v_S` indexed by the subsets of a model.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "Vec<(Subset, f64)>", into = "Vec<(Subset, f64)>")]
pub struct ValueFunction {
    values: BTreeMap<Subset, f64>,
}

impl From<Vec<(Subset, f64)>> for ValueFunction {
    fn from(v: Vec<(Subset, f64)>) -> Self {
        ValueFunction::new(v)
    }
}

impl From<ValueFunction> for Vec<(Subset, f64)> {
    fn from(v: ValueFunction) -> Self {
        v.values.into_iter().collect()
    }
}

impl ValueFunction {
    pub fn new<I: IntoIterator<Item = (Subset, f64)>>(values: I) -> Self {
        ValueFunction {
            values: values.into_iter().collect(),
        }
    }

    /// Pairs the model's subsets, in canonical order, with `values`.
    pub fn on_model(model: &Model, values: &[f64]) -> Result<Self> {
        if model.card() != values.len() {
            return Err(Error::DomainMismatch);
        }
        Ok(Self::new(model.subsets().zip(values.iter().copied())))
    }

    pub fn get(&self, s: Subset) -> Option<f64> {
        self.values.get(&s).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Subset, f64)> + '_ {
        self.values.iter().map(|(&s, &v)| (s, v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn matches(&self, model: &Model) -> bool {
        self.values.len() == model.card() && self.values.keys().copied().eq(model.subsets())
    }

    /// `Σ_{S ⊆ a} v_S` over this function's own domain.
    pub fn score(&self, a: Alternative) -> f64 {
        self.values
            .iter()
            .filter(|(s, _)| s.is_subset_of(a))
            .map(|(_, v)| v)
            .sum()
    }
}

/// `f_{θ,v}(a) = Σ_{S∈θ} I_a(S) v_S`.
pub fn evaluate(model: &Model, v: &ValueFunction, a: Alternative) -> Result<f64> {
    if !v.matches(model) {
        return Err(Error::DomainMismatch);
    }
    Ok(v.score(a))
}

/// Strict pairwise comparisons: `(a, b)` means `a` is preferred to `b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreferenceSet {
    n: usize,
    pairs: Vec<(Alternative, Alternative)>,
}

impl PreferenceSet {
    /// Validates and deduplicates `pairs`, keeping first occurrences.
    pub fn new(n: usize, pairs: Vec<(Alternative, Alternative)>) -> Result<Self> {
        if n == 0 || n > MAX_FEATURES {
            return Err(Error::GroundSetSize(n));
        }
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(pairs.len());
        for (a, b) in pairs {
            check_within(a, n)?;
            check_within(b, n)?;
            if a == b {
                return Err(Error::SelfPreference(a));
            }
            if seen.contains(&(b, a)) {
                return Err(Error::BothOrientations(a, b));
            }
            if seen.insert((a, b)) {
                out.push((a, b));
            }
        }
        Ok(PreferenceSet { n, pairs: out })
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pairs(&self) -> &[(Alternative, Alternative)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, a: Alternative, b: Alternative) -> bool {
        self.pairs.contains(&(a, b))
    }

    /// The pairs not implied by a chain of two or more other pairs. When the
    /// comparisons are acyclic, `f(a) − f(b) ≥ 1` over these pairs admits
    /// exactly the value functions it admits over all pairs, since each
    /// dropped pair is the sum of at least two kept ones. A cyclic set is
    /// returned unchanged.
    pub fn essential_pairs(&self) -> Vec<(Alternative, Alternative)> {
        let mut index: HashMap<Alternative, usize> = HashMap::new();
        for &(a, b) in &self.pairs {
            let k = index.len();
            index.entry(a).or_insert(k);
            let k = index.len();
            index.entry(b).or_insert(k);
        }
        let nodes = index.len();
        let words = nodes.div_ceil(64);
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); nodes];
        let mut indeg = vec![0usize; nodes];
        for &(a, b) in &self.pairs {
            succ[index[&a]].push(index[&b]);
            indeg[index[&b]] += 1;
        }
        let mut order = Vec::with_capacity(nodes);
        let mut stack: Vec<usize> = (0..nodes).filter(|&v| indeg[v] == 0).collect();
        while let Some(v) = stack.pop() {
            order.push(v);
            for &w in &succ[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    stack.push(w);
                }
            }
        }
        if order.len() < nodes {
            return self.pairs.clone();
        }
        // reach[v]: nodes reachable from v in one or more steps.
        let mut reach = vec![vec![0u64; words]; nodes];
        // far[v]: nodes reachable from v in two or more steps.
        let mut far = vec![vec![0u64; words]; nodes];
        for &v in order.iter().rev() {
            let mut r = vec![0u64; words];
            let mut f = vec![0u64; words];
            for &w in &succ[v] {
                r[w / 64] |= 1 << (w % 64);
                for k in 0..words {
                    r[k] |= reach[w][k];
                    f[k] |= reach[w][k];
                }
            }
            reach[v] = r;
            far[v] = f;
        }
        self.pairs
            .iter()
            .filter(|(a, b)| {
                let (v, w) = (index[a], index[b]);
                far[v][w / 64] & (1 << (w % 64)) == 0
            })
            .copied()
            .collect()
    }

    /// The pairs whose positions are selected by `keep`.
    pub fn subset_by(&self, mut keep: impl FnMut(usize) -> bool) -> PreferenceSet {
        PreferenceSet {
            n: self.n,
            pairs: self
                .pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| keep(*i))
                .map(|(_, &p)| p)
                .collect(),
        }
    }

    /// Every pair `(a, b)` with `a` strictly before `b` in `order`, best
    /// first. Each entry of `order` is a class of equally preferred
    /// alternatives.
    pub fn from_ranking(n: usize, order: &[Vec<Alternative>]) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, hi) in order.iter().enumerate() {
            for lo in &order[i + 1..] {
                for &a in hi {
                    for &b in lo {
                        pairs.push((a, b));
                    }
                }
            }
        }
        Self::new(n, pairs)
    }
}

/// Items with integer ratings on the scale `1..=scale`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatedDataset {
    n: usize,
    scale: u32,
    items: Vec<(Alternative, u32)>,
}

impl RatedDataset {
    pub fn new(n: usize, scale: u32, items: Vec<(Alternative, u32)>) -> Result<Self> {
        if n == 0 || n > MAX_FEATURES {
            return Err(Error::GroundSetSize(n));
        }
        for &(a, r) in &items {
            check_within(a, n)?;
            if r == 0 || r > scale {
                return Err(Error::RatingOutOfScale { rating: r, scale });
            }
        }
        Ok(RatedDataset { n, scale, items })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn items(&self) -> &[(Alternative, u32)] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Rating of `a` if it occurs in the data with a single rating.
    pub fn rating_of(&self, a: Alternative) -> Option<u32> {
        let mut found = None;
        for &(x, r) in &self.items {
            if x == a {
                match found {
                    None => found = Some(r),
                    Some(prev) if prev != r => return None,
                    _ => {}
                }
            }
        }
        found
    }

    pub fn select(&self, idx: &[usize]) -> RatedDataset {
        RatedDataset {
            n: self.n,
            scale: self.scale,
            items: idx.iter().map(|&i| self.items[i]).collect(),
        }
    }
}

/// How identical alternatives with different ratings are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CollisionPolicy {
    #[default]
    Error,
    Drop,
}

/// The preference set derived from ratings, with the number of distinct
/// alternatives dropped because of conflicting ratings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedPreferences {
    pub preferences: PreferenceSet,
    pub dropped: usize,
}

/// `R = {(A_i, A_j) : r_i > r_j}` after merging identical alternatives.
pub fn derive_preferences(
    data: &RatedDataset,
    policy: CollisionPolicy,
) -> Result<DerivedPreferences> {
    let mut merged: Vec<(Alternative, u32)> = Vec::new();
    let mut position: HashMap<Alternative, usize> = HashMap::new();
    let mut conflicts: BTreeSet<Alternative> = BTreeSet::new();
    for &(a, r) in data.items() {
        match position.get(&a) {
            Some(&i) => {
                if merged[i].1 != r {
                    conflicts.insert(a);
                }
            }
            None => {
                position.insert(a, merged.len());
                merged.push((a, r));
            }
        }
    }
    if !conflicts.is_empty() && policy == CollisionPolicy::Error {
        return Err(Error::ConflictingRatings(conflicts.into_iter().collect()));
    }
    let kept: Vec<(Alternative, u32)> = merged
        .into_iter()
        .filter(|(a, _)| !conflicts.contains(a))
        .collect();
    let mut pairs = Vec::new();
    for &(a, ra) in &kept {
        for &(b, rb) in &kept {
            if ra > rb {
                pairs.push((a, b));
            }
        }
    }
    Ok(DerivedPreferences {
        preferences: PreferenceSet::new(data.n(), pairs)?,
        dropped: conflicts.len(),
    })
}
