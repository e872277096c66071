use std::collections::HashSet;
use std::fs;

use robord_cli::experiment::{aggregate, evaluation_pairs, Mode};
use robord_cli::output::*;
use robord_cli::{run_experiment, write_outputs, ExperimentConfig, Method};
use robord_core::datagen::{rng_from_seed, sample_train_split, sample_user, GenConfig};
use robord_core::metrics::mean_defined;

fn small(seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        runs: 3,
        pairs: 20,
        seed,
        gen: GenConfig {
            n: 6,
            ..GenConfig::default()
        },
        train_min: 8,
        train_max: 14,
        ..ExperimentConfig::default()
    }
}

#[test]
fn one_run_one_pair() {
    let cfg = ExperimentConfig {
        runs: 1,
        pairs: 1,
        ..small(1)
    };
    let out = run_experiment(&cfg).unwrap();
    assert_eq!(out.records.len(), 4);
    assert!(out.records.iter().all(|r| r.confusion.total() == 1));
    assert_eq!(out.predictions.len(), 4);
}

#[test]
fn records_cover_the_protocol_ranges() {
    let out = run_experiment(&small(2)).unwrap();
    assert!(out.skipped.is_empty(), "{:?}", out.skipped);
    for r in &out.records {
        assert!((8..=14).contains(&r.train_size));
        assert!(r.r_size <= r.train_size * (r.train_size - 1) / 2);
        assert!(r.confusion.total() == 20);
    }
    for p in &out.predictions {
        assert!(p.utility_gap.is_some());
        assert_ne!(p.a, p.b);
    }
}

#[test]
fn evaluation_pairs_leave_the_training_set() {
    let mut rng = rng_from_seed(3);
    let train: Vec<usize> = (0..50).collect();
    let pairs = evaluation_pairs(64, &train, 100, &mut rng);
    assert_eq!(pairs.len(), 100);
    let mut seen = HashSet::new();
    for &(i, j) in &pairs {
        assert!(i != j && (i >= 50 || j >= 50));
        assert!(seen.insert((i.min(j), i.max(j))));
    }
    // Fewer qualifying pairs than requested: all of them.
    let pairs = evaluation_pairs(6, &[0, 1, 2, 3, 4], 100, &mut rng);
    assert_eq!(pairs.len(), 5);
}

#[test]
fn distinct_ordered_predictions() {
    let cfg = ExperimentConfig {
        runs: 1,
        pairs: 200,
        ..small(3)
    };
    let out = run_experiment(&cfg).unwrap();
    let ord: Vec<_> = out.predictions.iter().filter(|p| p.method == Method::Ord).collect();
    assert_eq!(ord.len(), 200);
    let unordered: HashSet<_> = ord.iter().map(|p| (p.a.bits().min(p.b.bits()), p.a.bits().max(p.b.bits()))).collect();
    assert_eq!(unordered.len(), 200);
}

#[test]
fn aggregates_match_the_runs() {
    let cfg = small(4);
    let out = run_experiment(&cfg).unwrap();
    assert_eq!(out.aggregates, aggregate(&out.records, &cfg.methods()));
    for a in &out.aggregates {
        let rows: Vec<_> = out.records.iter().filter(|r| r.method == a.method).collect();
        assert_eq!(a.runs, rows.len());
        assert_eq!(a.mean.f1, mean_defined(rows.iter().map(|r| r.scores.f1)));
        assert_eq!(a.pooled.total(), rows.iter().map(|r| r.confusion.total()).sum::<u64>());
    }
}

#[test]
fn same_seed_same_files() {
    let cfg = small(5);
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        write_outputs(d.path(), &cfg, &run_experiment(&cfg).unwrap()).unwrap();
    }
    for name in [RECORDS_JSON, RECORDS_CSV, SUMMARY_CSV, CURVES_CSV, F1_THRESHOLD_CSV, PREDICTIONS_CSV] {
        let a = fs::read(dirs[0].path().join(name)).unwrap();
        let b = fs::read(dirs[1].path().join(name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
    assert!(dirs[0].path().join(TIMINGS_CSV).exists());
    let other = run_experiment(&small(6)).unwrap();
    assert_ne!(other.records, run_experiment(&cfg).unwrap().records);
}

#[test]
fn output_schema() {
    let cfg = small(7);
    let dir = tempfile::tempdir().unwrap();
    write_outputs(dir.path(), &cfg, &run_experiment(&cfg).unwrap()).unwrap();
    let text = fs::read_to_string(dir.path().join(RECORDS_CSV)).unwrap();
    let header = text.lines().next().unwrap();
    assert_eq!(
        header,
        "run,method,train_size,r_size,deg,card,ws,bb,bw,bu,wb,ww,wu,ub,uw,uu,precision,recall,f1,correctness,prediction_rate"
    );
    assert_eq!(text.lines().count(), 1 + 3 * 4);
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join(RECORDS_JSON)).unwrap()).unwrap();
    assert_eq!(json["records"].as_array().unwrap().len(), 12);
    assert!(json["records"][0].get("timings").is_none());
    let thresholds = fs::read_to_string(dir.path().join(F1_THRESHOLD_CSV)).unwrap();
    assert!(thresholds.starts_with("method,min_r_size,mean_f1,runs\n"));
}

#[test]
fn real_mode_uses_ninety_percent() {
    let user = sample_user(&GenConfig {
        n: 6,
        seed: 8,
        ..GenConfig::default()
    })
    .unwrap();
    let data = sample_train_split(&user, 50, 9).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ratings.csv");
    robord_cli::write_ratings(&data, fs::File::create(&path).unwrap()).unwrap();
    let cfg = ExperimentConfig {
        mode: Mode::Real,
        data: Some(path),
        runs: 2,
        pairs: 30,
        ..ExperimentConfig::default()
    };
    let out = run_experiment(&cfg).unwrap();
    assert!(out.skipped.is_empty(), "{:?}", out.skipped);
    assert!(out.records.iter().all(|r| r.train_size == 45));
    // 5 held-out items give C(50,2) − C(45,2) = 235 qualifying pairs.
    assert!(out.records.iter().all(|r| r.confusion.total() == 30));
    assert!(out.predictions.iter().all(|p| p.utility_gap.is_none()));
}

#[test]
fn invalid_configurations() {
    let bad = [
        ExperimentConfig { runs: 0, ..small(0) },
        ExperimentConfig { train_min: 20, train_max: 10, ..small(0) },
        ExperimentConfig { train_max: 64, ..small(0) },
        ExperimentConfig { mode: Mode::Real, ..small(0) },
    ];
    for cfg in bad {
        assert!(run_experiment(&cfg).is_err());
    }
}

#[test]
fn configuration_files_may_be_partial() {
    let cfg: ExperimentConfig = serde_json::from_str(r#"{"runs": 2, "gen": {"n": 5}}"#).unwrap();
    assert_eq!(cfg.runs, 2);
    assert_eq!(cfg.pairs, 100);
    assert_eq!(cfg.gen.n, 5);
    assert_eq!(cfg.gen.t, 12);
}
