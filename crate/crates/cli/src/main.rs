use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use robord_cli::experiment::SolverConfig;
use robord_cli::output::verdict_label;
use robord_cli::{ingest, CliError, ExperimentConfig, Method, Result};
use robord_core::baselines::{fit_knn_with, fit_lr, fit_svm, KnnRule, DEFAULT_K};
use robord_core::datagen::{sample_train_split, sample_user, GenConfig};
use robord_core::oracle::EnumerationBudget;
use robord_core::{derive_preferences, lex_signature_with, CollisionPolicy, LexStrategy, RobustContext, Verdict};
use serde_json::json;

#[derive(Parser)]
#[command(name = "robord", version, about = "Robust ordinal regression over feature-subset models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simplest-model signature of the preferences in a ratings file.
    LexModel {
        csv: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Three-way predictions for the pairs of a pair file.
    Predict {
        csv: PathBuf,
        pairs: PathBuf,
        #[arg(long, value_enum, default_value = "ord")]
        method: MethodArg,
        /// Neighbours used by knn.
        #[arg(long, short = 'k', default_value_t = DEFAULT_K)]
        k: usize,
        #[arg(long, value_enum, default_value = "vote")]
        knn_rule: KnnRuleArg,
        #[command(flatten)]
        common: Common,
    },
    /// Samples a synthetic user and writes its ratings.
    Synth {
        /// Generator parameters as JSON.
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Number of rated alternatives (default: all of them).
        #[arg(long)]
        items: Option<usize>,
        /// Ratings file to write (default: standard output).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the generating model and values as JSON.
        #[arg(long)]
        model_out: Option<PathBuf>,
    },
    /// Runs a train/evaluate sweep and writes its result files.
    Experiment {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (overrides the configuration).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, short = 'k')]
        k: Option<usize>,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_enum)]
        collision: Option<CollisionArg>,
    },
    /// Checks the solvers against brute-force enumeration on a small
    /// instance: `example1`, `example2`, `contradictory` or a JSON file.
    Verify { instance: String },
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum, default_value = "error")]
    collision: CollisionArg,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args, Default)]
struct SolverArgs {
    #[arg(long, value_enum)]
    strategy: Option<StrategyArg>,
    /// Initial big-M constant.
    #[arg(long)]
    big_m: Option<f64>,
    /// Branch-and-bound node limit.
    #[arg(long)]
    node_limit: Option<usize>,
}

impl SolverArgs {
    fn apply(&self, mut cfg: SolverConfig) -> SolverConfig {
        if let Some(s) = self.strategy {
            cfg.strategy = match s {
                StrategyArg::CoreGuided => LexStrategy::CoreGuided,
                StrategyArg::BigM => LexStrategy::BigM,
            };
        }
        if let Some(m) = self.big_m {
            cfg.big_m = m;
        }
        if let Some(l) = self.node_limit {
            cfg.node_limit = l;
        }
        cfg
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    CoreGuided,
    BigM,
}

#[derive(Clone, Copy, ValueEnum)]
enum CollisionArg {
    Error,
    Drop,
}

impl From<CollisionArg> for CollisionPolicy {
    fn from(c: CollisionArg) -> Self {
        match c {
            CollisionArg::Error => CollisionPolicy::Error,
            CollisionArg::Drop => CollisionPolicy::Drop,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KnnRuleArg {
    Mean,
    Vote,
}

impl From<KnnRuleArg> for KnnRule {
    fn from(r: KnnRuleArg) -> Self {
        match r {
            KnnRuleArg::Mean => KnnRule::Mean,
            KnnRuleArg::Vote => KnnRule::Vote,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Ord,
    Lr,
    Svm,
    Knn,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out).map_err(|source| CliError::Io {
        path: "<stdout>".into(),
        source,
    })
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::LexModel { csv, common } => {
            let data = ingest::ingest_csv(&csv)?;
            let derived = derive_preferences(&data, common.collision.into())?;
            let r = derived.preferences;
            let sig = lex_signature_with(&r, &common.solver.apply(SolverConfig::default()).lex_options())?;
            print_json(&json!({
                "n": data.n(),
                "items": data.len(),
                "dropped": derived.dropped,
                "r_size": r.len(),
                "deg": sig.deg,
                "card": sig.card,
                "ws": sig.ws,
                "witness": sig.witness,
            }))?;
        }
        Command::Predict {
            csv,
            pairs,
            method,
            k,
            knn_rule,
            common,
        } => {
            let data = ingest::ingest_csv(&csv)?;
            let queries = ingest::read_pairs_file(&pairs, data.n())?;
            let r = derive_preferences(&data, common.collision.into())?.preferences;
            let opts = common.solver.apply(SolverConfig::default()).lex_options();
            let sig = lex_signature_with(&r, &opts)?;
            let verdicts: Vec<Verdict> = match method {
                MethodArg::Ord => {
                    let ctx = RobustContext::new(&r, &sig, &opts);
                    queries
                        .iter()
                        .map(|&(a, b)| Ok(ctx.predict(a, b)?.verdict))
                        .collect::<Result<_>>()?
                }
                baseline => {
                    let model = match baseline {
                        MethodArg::Lr => fit_lr(&data, sig.deg)?,
                        MethodArg::Svm => fit_svm(&r, sig.deg)?,
                        _ => fit_knn_with(&data, sig.deg, k, knn_rule.into())?,
                    };
                    queries.iter().map(|&(a, b)| model.predict(a, b)).collect()
                }
            };
            let mut w = csv::Writer::from_writer(io::stdout().lock());
            w.write_record(["a", "b", "verdict"])?;
            for (&(a, b), v) in queries.iter().zip(verdicts) {
                w.write_record([a.to_bitstring(data.n()), b.to_bitstring(data.n()), verdict_label(v).into()])?;
            }
            w.flush().map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            })?;
        }
        Command::Synth {
            config,
            seed,
            items,
            out,
            model_out,
        } => {
            let mut gen: GenConfig = read_json(&config)?;
            if let Some(s) = seed {
                gen.seed = s;
            }
            let user = sample_user(&gen)?;
            let data = match items {
                Some(k) => sample_train_split(&user, k, gen.seed.wrapping_add(1))?,
                None => user.full_dataset(),
            };
            match &out {
                Some(path) => {
                    let file = fs::File::create(path).map_err(|source| CliError::Io {
                        path: path.clone(),
                        source,
                    })?;
                    ingest::write_ratings(&data, file)?;
                }
                None => ingest::write_ratings(&data, io::stdout().lock())?,
            }
            if let Some(path) = model_out {
                let text = serde_json::to_string_pretty(&user)?;
                fs::write(&path, text + "\n").map_err(|source| CliError::Io { path, source })?;
            }
        }
        Command::Experiment {
            config,
            seed,
            out,
            k,
            solver,
            collision,
        } => {
            let mut cfg: ExperimentConfig = read_json(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(o) = out {
                cfg.output = Some(o);
            }
            if let Some(k) = k {
                cfg.knn_k = k;
            }
            if let Some(c) = collision {
                cfg.collision = c.into();
            }
            cfg.solver = solver.apply(cfg.solver.clone());
            if let Some(data) = &cfg.data {
                if data.is_relative() {
                    if let Some(dir) = config.parent() {
                        cfg.data = Some(dir.join(data));
                    }
                }
            }
            let result = robord_cli::run_experiment(&cfg)?;
            if let Some(dir) = &cfg.output {
                robord_cli::write_outputs(dir, &cfg, &result)?;
            }
            let summary: Vec<_> = result
                .aggregates
                .iter()
                .map(|a| json!({"method": a.method.name(), "runs": a.runs, "mean": a.mean}))
                .collect();
            print_json(&json!({
                "runs": cfg.runs,
                "skipped": result.skipped,
                "summary": summary,
                "methods": cfg.methods().iter().map(|m: &Method| m.name()).collect::<Vec<_>>(),
            }))?;
        }
        Command::Verify { instance } => {
            let inst = robord_cli::load_instance(&instance)?;
            let report = robord_cli::verify(&inst, &Default::default(), &EnumerationBudget::default())?;
            for c in &report.checks {
                eprintln!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            print_json(&serde_json::to_value(&report)?)?;
            return Ok(report.passed());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{}", CliError::Usage(e.to_string().trim_end().to_string()).to_json());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(1)
        }
    }
}
