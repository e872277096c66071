mod common;

use rand::Rng;
use robord_core::oracle::{self, fixtures, EnumerationBudget, Simplicity};
use robord_core::*;

fn pair(a: &[usize], b: &[usize]) -> (Subset, Subset) {
    (Subset::of(a), Subset::of(b))
}

#[test]
fn theta_feasible_examples() {
    let r = fixtures::example_closure();
    assert!(!theta_feasible(&r, &Model::singletons(4)).unwrap());
    assert!(theta_feasible(&r, &fixtures::example_theta1()).unwrap());
    let empty = PreferenceSet::empty(4).unwrap();
    assert!(theta_feasible(&empty, &Model::singletons(4)).unwrap());
    assert!(theta_feasible(&empty, &Model::empty()).unwrap());
}

#[test]
fn signature_of_example_closure() {
    let sig = lex_signature(&fixtures::example_closure()).unwrap();
    assert_eq!(sig.triple(), (3, 5, 7));
    assert_eq!(sig.witness, fixtures::example_theta1());
}

#[test]
fn signature_of_single_pair() {
    let r = PreferenceSet::new(2, vec![pair(&[1], &[2])]).unwrap();
    let sig = lex_signature(&r).unwrap();
    assert_eq!(sig.triple(), (1, 1, 1));
    assert!(sig.witness == Model::new([Subset::of(&[1])]).unwrap() || sig.witness == Model::new([Subset::of(&[2])]).unwrap());
}

#[test]
fn signature_of_singleton_chain() {
    assert_eq!(lex_signature(&fixtures::singleton_chain()).unwrap().triple(), (1, 3, 3));
}

#[test]
fn signature_of_empty_preferences() {
    let sig = lex_signature(&PreferenceSet::empty(3).unwrap()).unwrap();
    assert_eq!(sig.triple(), (0, 0, 0));
    assert!(sig.witness.is_empty());
}

#[test]
fn signature_of_cycle_is_an_error() {
    let r = PreferenceSet::new(2, vec![pair(&[1], &[2]), pair(&[2], &[1, 2]), pair(&[1, 2], &[1])]).unwrap();
    assert!(matches!(lex_signature(&r), Err(Error::InconsistentPreferences)));
}

fn big_m() -> LexOptions {
    LexOptions {
        strategy: LexStrategy::BigM,
        ..LexOptions::default()
    }
}

#[test]
fn big_m_route_on_examples() {
    let sig = lex_signature_with(&fixtures::example_closure(), &big_m()).unwrap();
    assert_eq!(sig.triple(), (3, 5, 7));
    assert_eq!(sig.witness, fixtures::example_theta1());
    let sig = lex_signature_with(&fixtures::singleton_chain(), &big_m()).unwrap();
    assert_eq!(sig.triple(), (1, 3, 3));
}

fn instances(seed: u64, count: usize, n_max: usize) -> Vec<PreferenceSet> {
    let mut rng = common::rng(seed);
    (0..count)
        .map(|i| {
            let n = rng.random_range(2..=n_max);
            let k = rng.random_range(3..=10);
            if i % 2 == 0 {
                common::random_ranked(&mut rng, n, k, 4)
            } else {
                common::synthetic(&mut rng, n, 0.3, k)
            }
        })
        .filter(|r| !r.is_empty())
        .collect()
}

#[test]
fn witness_invariants() {
    for r in instances(11, 40, 5) {
        let sig = lex_signature(&r).unwrap();
        assert_eq!(sig.deg, degree::min_degree(&r).unwrap());
        assert_eq!(sig.witness.key(), sig.triple());
        assert!(theta_feasible(&r, &sig.witness).unwrap());
        assert!(sig.card <= sig.ws && sig.ws <= sig.card * sig.deg);
    }
}

#[test]
fn signature_is_lexicographically_minimal() {
    let budget = EnumerationBudget::default();
    for r in instances(12, 30, 4) {
        let sig = lex_signature(&r).unwrap();
        let simplest = oracle::enumerate_simplest(&r, Simplicity::Lex, &budget).unwrap();
        assert!(!simplest.is_empty());
        for m in &simplest {
            assert_eq!(m.key(), sig.triple(), "R = {:?}", r.pairs());
        }
        assert!(simplest.contains(&sig.witness));
    }
}

#[test]
fn signature_monotone_under_removal() {
    let mut rng = common::rng(13);
    for r in instances(13, 30, 5) {
        let keep: Vec<bool> = (0..r.len()).map(|_| rng.random_bool(0.6)).collect();
        let sub = r.subset_by(|i| keep[i]);
        let (small, big) = (lex_signature(&sub).unwrap(), lex_signature(&r).unwrap());
        assert!(small.triple() <= big.triple(), "{:?} > {:?}", small.triple(), big.triple());
    }
}

#[test]
fn big_m_route_agrees_with_core_guided() {
    for r in instances(14, 24, 5) {
        let a = lex_signature(&r).unwrap();
        let b = lex_signature_with(&r, &big_m()).unwrap();
        assert_eq!(a.triple(), b.triple(), "R = {:?}", r.pairs());
        assert!(theta_feasible(&r, &b.witness).unwrap());
    }
}

#[test]
fn mip_hitting_sets_agree_with_search() {
    let mip = LexOptions {
        hitting: HittingSetMethod::Mip,
        ..LexOptions::default()
    };
    for r in instances(15, 24, 5) {
        assert_eq!(lex_signature(&r).unwrap().triple(), lex_signature_with(&r, &mip).unwrap().triple());
    }
}

#[test]
fn plain_cores_agree_with_greedy_cores() {
    let plain = LexOptions {
        greedy_cores: false,
        ..LexOptions::default()
    };
    for r in instances(16, 16, 5) {
        assert_eq!(lex_signature(&r).unwrap().triple(), lex_signature_with(&r, &plain).unwrap().triple());
    }
}
