//! Train/evaluate sweeps over synthetic users or an ingested dataset.

use std::collections::HashSet;
use std::path::PathBuf;
use std::time::Instant;

use rand::seq::index;
use rand::{Rng, RngCore};
use robord_core::baselines::{fit_knn_with, fit_lr, fit_svm, BaselinePredictor, KnnRule, DEFAULT_K};
use robord_core::datagen::{rng_from_seed, sample_train_split_with, sample_user_with, GenConfig, Rng64};
use robord_core::metrics::{mean_defined, tally, ConfusionMatrix, Scores, Truth};
use robord_core::{
    derive_preferences, lex_signature_with, Alternative, CollisionPolicy, LexOptions, LexStrategy, RatedDataset,
    RobustContext, Verdict,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::ingest::ingest_csv;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Synthetic,
    Real,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ord,
    Lr,
    Svm,
    Knn,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Ord => "ord",
            Method::Lr => "lr",
            Method::Svm => "svm",
            Method::Knn => "knn",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Baselines {
    pub lr: bool,
    pub svm: bool,
    pub knn: bool,
}

impl Default for Baselines {
    fn default() -> Self {
        Baselines {
            lr: true,
            svm: true,
            knn: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub strategy: LexStrategy,
    pub big_m: f64,
    pub node_limit: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let d = LexOptions::default();
        SolverConfig {
            strategy: d.strategy,
            big_m: d.big_m,
            node_limit: d.mip.node_limit,
        }
    }
}

impl SolverConfig {
    pub fn lex_options(&self) -> LexOptions {
        let mut opts = LexOptions {
            strategy: self.strategy,
            big_m: self.big_m,
            ..LexOptions::default()
        };
        opts.big_m_max = opts.big_m_max.max(self.big_m);
        opts.mip.node_limit = self.node_limit;
        opts
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub mode: Mode,
    /// Generator parameters (synthetic mode); `gen.seed` is unused, every
    /// draw derives from `seed`.
    pub gen: GenConfig,
    /// Range of `|A_train|` in synthetic mode, drawn uniformly per run.
    pub train_min: usize,
    pub train_max: usize,
    /// Ratings file (real mode).
    pub data: Option<PathBuf>,
    /// Share of the dataset used for training (real mode).
    pub train_fraction: f64,
    pub pairs: usize,
    pub runs: usize,
    pub baselines: Baselines,
    pub knn_k: usize,
    pub knn_rule: KnnRule,
    pub solver: SolverConfig,
    pub collision: CollisionPolicy,
    pub seed: u64,
    /// Directory receiving the output files; not echoed in them.
    #[serde(skip_serializing)]
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            mode: Mode::Synthetic,
            gen: GenConfig::default(),
            train_min: 12,
            train_max: 29,
            data: None,
            train_fraction: 0.9,
            pairs: 100,
            runs: 10,
            baselines: Baselines::default(),
            knn_k: DEFAULT_K,
            knn_rule: KnnRule::Vote,
            solver: SolverConfig::default(),
            collision: CollisionPolicy::Error,
            seed: 0,
            output: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(CliError::Config(m.to_string()));
        match self.mode {
            Mode::Synthetic => {
                self.gen.validate()?;
                if self.train_min < 2 || self.train_min > self.train_max {
                    return bad("need 2 <= train_min <= train_max");
                }
                if self.train_max >= 1 << self.gen.n {
                    return bad("train_max must leave alternatives outside the training set");
                }
            }
            Mode::Real => {
                if self.data.is_none() {
                    return bad("real mode needs a `data` file");
                }
                if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
                    return bad("train_fraction must lie in (0, 1)");
                }
            }
        }
        if self.runs == 0 || self.pairs == 0 {
            return bad("runs and pairs must be positive");
        }
        if self.knn_k == 0 {
            return bad("knn_k must be positive");
        }
        Ok(())
    }

    pub fn methods(&self) -> Vec<Method> {
        let mut m = vec![Method::Ord];
        let b = self.baselines;
        for (on, method) in [(b.lr, Method::Lr), (b.svm, Method::Svm), (b.knn, Method::Knn)] {
            if on {
                m.push(method);
            }
        }
        m
    }
}

/// One evaluated pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub run: usize,
    pub method: Method,
    pub a: Alternative,
    pub b: Alternative,
    pub verdict: Verdict,
    pub rating_a: u32,
    pub rating_b: u32,
    /// `f(a) − f(b)` under the generating utility (synthetic mode).
    pub utility_gap: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Timings {
    /// Signature computation or baseline fit, in seconds.
    pub learn: f64,
    /// All predictions of the run, in seconds.
    pub predict: f64,
    pub predictions: usize,
}

impl Timings {
    pub fn per_prediction(&self) -> Option<f64> {
        (self.predictions > 0).then(|| self.predict / self.predictions as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub method: Method,
    pub train_size: usize,
    pub r_size: usize,
    pub signature: (usize, usize, usize),
    pub confusion: ConfusionMatrix,
    pub scores: Scores,
    /// Wall-clock times; kept out of the deterministic output files.
    #[serde(skip)]
    pub timings: Timings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedRun {
    pub run: usize,
    pub method: Option<Method>,
    pub reason: String,
}

/// Mean of the per-run scores of one method, plus the pooled matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub method: Method,
    pub runs: usize,
    pub mean: Scores,
    pub pooled: ConfusionMatrix,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ExperimentOutput {
    /// Number of features.
    pub n: usize,
    pub records: Vec<RunRecord>,
    pub predictions: Vec<PredictionRecord>,
    pub skipped: Vec<SkippedRun>,
    pub aggregates: Vec<Aggregate>,
}

/// What a run draws its evaluation pairs from.
struct Population {
    items: Vec<(Alternative, u32)>,
    train: Vec<usize>,
    gap: Option<Box<dyn Fn(Alternative, Alternative) -> f64>>,
}

impl Population {
    fn train_set(&self, n: usize, scale: u32) -> Result<RatedDataset> {
        Ok(RatedDataset::new(n, scale, self.train.iter().map(|&i| self.items[i]).collect())?)
    }
}

fn synthetic_population(cfg: &ExperimentConfig, rng: &mut Rng64) -> Result<(Population, usize, u32)> {
    let user = sample_user_with(&cfg.gen, rng)?;
    let k = rng.random_range(cfg.train_min..=cfg.train_max);
    let train = sample_train_split_with(&user, k, rng)?;
    let items = user.full_dataset().items().to_vec();
    // The full dataset is indexed by bit value.
    let train_idx = train.items().iter().map(|&(a, _)| a.bits() as usize).collect();
    let (n, scale) = (user.n, user.scale());
    let gap = move |a: Alternative, b: Alternative| user.score(a) - user.score(b);
    Ok((
        Population {
            items,
            train: train_idx,
            gap: Some(Box::new(gap)),
        },
        n,
        scale,
    ))
}

fn real_population(data: &RatedDataset, fraction: f64, rng: &mut Rng64) -> Result<Population> {
    let total = data.len();
    if total < 3 {
        return Err(CliError::Config(format!("{total} items are too few to split")));
    }
    let k = ((fraction * total as f64).round() as usize).clamp(2, total - 1);
    let mut train = index::sample(rng, total, k).into_vec();
    train.sort_unstable();
    Ok(Population {
        items: data.items().to_vec(),
        train,
        gap: None,
    })
}

/// Up to `count` distinct unordered index pairs with at least one member
/// outside `train`, uniformly, each in random orientation.
pub fn evaluation_pairs(total: usize, train: &[usize], count: usize, rng: &mut Rng64) -> Vec<(usize, usize)> {
    let in_train: HashSet<usize> = train.iter().copied().collect();
    let k = in_train.len();
    let qualifying = total * (total - 1) / 2 - k * k.saturating_sub(1) / 2;
    let mut out = Vec::new();
    if qualifying <= count {
        for i in 0..total {
            for j in i + 1..total {
                if !in_train.contains(&i) || !in_train.contains(&j) {
                    out.push((i, j));
                }
            }
        }
    } else {
        let mut seen = HashSet::new();
        while out.len() < count {
            let i = rng.random_range(0..total);
            let j = rng.random_range(0..total);
            if i == j || (in_train.contains(&i) && in_train.contains(&j)) {
                continue;
            }
            if seen.insert((i.min(j), i.max(j))) {
                out.push((i.min(j), i.max(j)));
            }
        }
    }
    out.into_iter()
        .map(|(i, j)| if rng.random_bool(0.5) { (j, i) } else { (i, j) })
        .collect()
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let data = match cfg.mode {
        Mode::Real => Some(ingest_csv(cfg.data.as_ref().expect("validated"))?),
        Mode::Synthetic => None,
    };
    let mut root = rng_from_seed(cfg.seed);
    let mut out = ExperimentOutput {
        n: data.as_ref().map_or(cfg.gen.n, |d| d.n()),
        ..ExperimentOutput::default()
    };
    for run in 0..cfg.runs {
        let mut rng = rng_from_seed(root.next_u64());
        if let Err(e) = run_once(cfg, run, data.as_ref(), &mut rng, &mut out) {
            out.skipped.push(SkippedRun {
                run,
                method: None,
                reason: e.to_string(),
            });
        }
    }
    out.aggregates = aggregate(&out.records, &cfg.methods());
    Ok(out)
}

fn run_once(
    cfg: &ExperimentConfig,
    run: usize,
    data: Option<&RatedDataset>,
    rng: &mut Rng64,
    out: &mut ExperimentOutput,
) -> Result<()> {
    let (pop, n, scale) = match data {
        None => synthetic_population(cfg, rng)?,
        Some(d) => (real_population(d, cfg.train_fraction, rng)?, d.n(), d.scale()),
    };
    let train = pop.train_set(n, scale)?;
    let r = derive_preferences(&train, cfg.collision)?.preferences;
    let pairs = evaluation_pairs(pop.items.len(), &pop.train, cfg.pairs, rng);
    let opts = cfg.solver.lex_options();

    let start = Instant::now();
    let sig = lex_signature_with(&r, &opts)?;
    let learn = start.elapsed().as_secs_f64();
    let ctx = RobustContext::new(&r, &sig, &opts);
    let start = Instant::now();
    let verdicts = pairs
        .iter()
        .map(|&(i, j)| Ok(ctx.predict(pop.items[i].0, pop.items[j].0)?.verdict))
        .collect::<Result<Vec<_>>>()?;
    let timings = Timings {
        learn,
        predict: start.elapsed().as_secs_f64(),
        predictions: pairs.len(),
    };

    let base = RunRecord {
        run,
        method: Method::Ord,
        train_size: train.len(),
        r_size: r.len(),
        signature: sig.triple(),
        confusion: ConfusionMatrix::default(),
        scores: Scores::default(),
        timings,
    };
    let emit = |method: Method, verdicts: &[Verdict], timings: Timings, out: &mut ExperimentOutput| {
        let mut truths = Vec::with_capacity(pairs.len());
        for (&(i, j), &verdict) in pairs.iter().zip(verdicts) {
            let ((a, ra), (b, rb)) = (pop.items[i], pop.items[j]);
            truths.push(Truth::from_ratings(ra, rb));
            out.predictions.push(PredictionRecord {
                run,
                method,
                a,
                b,
                verdict,
                rating_a: ra,
                rating_b: rb,
                utility_gap: pop.gap.as_ref().map(|g| g(a, b)),
            });
        }
        let confusion = tally(verdicts.iter().copied().zip(truths));
        out.records.push(RunRecord {
            method,
            confusion,
            scores: confusion.scores(),
            timings,
            ..base.clone()
        });
    };
    emit(Method::Ord, &verdicts, timings, out);

    let deg = sig.deg;
    for method in cfg.methods().into_iter().skip(1) {
        let start = Instant::now();
        let fitted: robord_core::Result<BaselinePredictor> = match method {
            Method::Lr => fit_lr(&train, deg),
            Method::Svm => fit_svm(&r, deg),
            Method::Knn => fit_knn_with(&train, deg, cfg.knn_k.min(train.len()), cfg.knn_rule),
            Method::Ord => unreachable!("ORD is evaluated first"),
        };
        let model = match fitted {
            Ok(m) => m,
            Err(e) => {
                out.skipped.push(SkippedRun {
                    run,
                    method: Some(method),
                    reason: e.to_string(),
                });
                continue;
            }
        };
        let learn = start.elapsed().as_secs_f64();
        let start = Instant::now();
        let verdicts: Vec<Verdict> = pairs
            .iter()
            .map(|&(i, j)| model.predict(pop.items[i].0, pop.items[j].0))
            .collect();
        let timings = Timings {
            learn,
            predict: start.elapsed().as_secs_f64(),
            predictions: pairs.len(),
        };
        emit(method, &verdicts, timings, out);
    }
    Ok(())
}

pub fn aggregate(records: &[RunRecord], methods: &[Method]) -> Vec<Aggregate> {
    methods
        .iter()
        .map(|&method| {
            let rows: Vec<&RunRecord> = records.iter().filter(|r| r.method == method).collect();
            let mut pooled = ConfusionMatrix::default();
            for r in &rows {
                pooled += r.confusion;
            }
            let mean =
                |f: fn(&Scores) -> Option<f64>| mean_defined(rows.iter().map(|r| f(&r.scores)));
            Aggregate {
                method,
                runs: rows.len(),
                mean: Scores {
                    precision: mean(|s| s.precision),
                    recall: mean(|s| s.recall),
                    f1: mean(|s| s.f1),
                    correctness: mean(|s| s.correctness),
                    prediction_rate: mean(|s| s.prediction_rate),
                },
                pooled,
            }
        })
        .collect()
}

/// Mean F1 of each method over the runs with `|R| ≥ x`, for every `x`
/// among the observed `|R|`.
pub fn f1_by_threshold(records: &[RunRecord], methods: &[Method]) -> Vec<(Method, usize, Option<f64>, usize)> {
    let mut xs: Vec<usize> = records.iter().map(|r| r.r_size).collect();
    xs.sort_unstable();
    xs.dedup();
    let mut out = Vec::new();
    for &method in methods {
        for &x in &xs {
            let rows: Vec<&RunRecord> = records.iter().filter(|r| r.method == method && r.r_size >= x).collect();
            out.push((method, x, mean_defined(rows.iter().map(|r| r.scores.f1)), rows.len()));
        }
    }
    out
}
