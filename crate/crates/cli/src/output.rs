//! Result files of an experiment. Everything except `timings.csv` is a
//! pure function of the configuration.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use robord_core::metrics::{ConfusionMatrix, Scores};
use robord_core::Verdict;
use serde::Serialize;

use crate::error::{io_err, Result};
use crate::experiment::{f1_by_threshold, ExperimentConfig, ExperimentOutput};

pub const RECORDS_JSON: &str = "records.json";
pub const RECORDS_CSV: &str = "records.csv";
pub const SUMMARY_CSV: &str = "summary.csv";
pub const CURVES_CSV: &str = "curves.csv";
pub const F1_THRESHOLD_CSV: &str = "f1_threshold.csv";
pub const PREDICTIONS_CSV: &str = "predictions.csv";
pub const TIMINGS_CSV: &str = "timings.csv";

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v}")).unwrap_or_default()
}

fn cells(m: &ConfusionMatrix) -> Vec<String> {
    m.cells().iter().map(|c| c.to_string()).collect()
}

fn scores(s: &Scores) -> Vec<String> {
    [s.precision, s.recall, s.f1, s.correctness, s.prediction_rate]
        .into_iter()
        .map(opt)
        .collect()
}

const CELL_NAMES: [&str; 9] = ["bb", "bw", "bu", "wb", "ww", "wu", "ub", "uw", "uu"];
const SCORE_NAMES: [&str; 5] = ["precision", "recall", "f1", "correctness", "prediction_rate"];

pub fn verdict_label(v: Verdict) -> &'static str {
    match v {
        Verdict::LeftBetter => "better",
        Verdict::RightBetter => "worse",
        Verdict::Unknown => "unknown",
    }
}

fn csv_file(dir: &Path, name: &str) -> Result<csv::Writer<BufWriter<File>>> {
    let path = dir.join(name);
    let file = File::create(&path).map_err(io_err(&path))?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

pub fn write_outputs(dir: &Path, cfg: &ExperimentConfig, out: &ExperimentOutput) -> Result<()> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;

    #[derive(Serialize)]
    struct Document<'a> {
        config: &'a ExperimentConfig,
        records: &'a [crate::experiment::RunRecord],
        skipped: &'a [crate::experiment::SkippedRun],
        aggregates: &'a [crate::experiment::Aggregate],
    }
    let path = dir.join(RECORDS_JSON);
    let mut file = BufWriter::new(File::create(&path).map_err(io_err(&path))?);
    serde_json::to_writer_pretty(
        &mut file,
        &Document {
            config: cfg,
            records: &out.records,
            skipped: &out.skipped,
            aggregates: &out.aggregates,
        },
    )?;
    writeln!(file).and_then(|_| file.flush()).map_err(io_err(&path))?;

    let mut w = csv_file(dir, RECORDS_CSV)?;
    let mut header = vec!["run", "method", "train_size", "r_size", "deg", "card", "ws"];
    header.extend(CELL_NAMES);
    header.extend(SCORE_NAMES);
    w.write_record(&header)?;
    for r in &out.records {
        let (deg, card, ws) = r.signature;
        let mut row = vec![
            r.run.to_string(),
            r.method.name().to_string(),
            r.train_size.to_string(),
            r.r_size.to_string(),
            deg.to_string(),
            card.to_string(),
            ws.to_string(),
        ];
        row.extend(cells(&r.confusion));
        row.extend(scores(&r.scores));
        w.write_record(&row)?;
    }
    w.flush().map_err(io_err(dir.join(RECORDS_CSV)))?;

    let mut w = csv_file(dir, SUMMARY_CSV)?;
    let mut header = vec!["method", "runs"];
    header.extend(SCORE_NAMES);
    header.extend(CELL_NAMES);
    w.write_record(&header)?;
    for a in &out.aggregates {
        let mut row = vec![a.method.name().to_string(), a.runs.to_string()];
        row.extend(scores(&a.mean));
        row.extend(cells(&a.pooled));
        w.write_record(&row)?;
    }
    w.flush().map_err(io_err(dir.join(SUMMARY_CSV)))?;

    let mut w = csv_file(dir, CURVES_CSV)?;
    let mut header = vec!["method", "r_size", "run"];
    header.extend(SCORE_NAMES);
    w.write_record(&header)?;
    let mut by_r: Vec<_> = out.records.iter().collect();
    by_r.sort_by_key(|r| (r.method, r.r_size, r.run));
    for r in by_r {
        let mut row = vec![r.method.name().to_string(), r.r_size.to_string(), r.run.to_string()];
        row.extend(scores(&r.scores));
        w.write_record(&row)?;
    }
    w.flush().map_err(io_err(dir.join(CURVES_CSV)))?;

    let mut w = csv_file(dir, F1_THRESHOLD_CSV)?;
    w.write_record(["method", "min_r_size", "mean_f1", "runs"])?;
    for (method, x, f1, count) in f1_by_threshold(&out.records, &cfg.methods()) {
        w.write_record([method.name().to_string(), x.to_string(), opt(f1), count.to_string()])?;
    }
    w.flush().map_err(io_err(dir.join(F1_THRESHOLD_CSV)))?;

    let mut w = csv_file(dir, PREDICTIONS_CSV)?;
    w.write_record(["run", "method", "a", "b", "verdict", "rating_a", "rating_b", "utility_gap"])?;
    let n = out.n;
    for p in &out.predictions {
        w.write_record([
            p.run.to_string(),
            p.method.name().to_string(),
            p.a.to_bitstring(n),
            p.b.to_bitstring(n),
            verdict_label(p.verdict).to_string(),
            p.rating_a.to_string(),
            p.rating_b.to_string(),
            opt(p.utility_gap),
        ])?;
    }
    w.flush().map_err(io_err(dir.join(PREDICTIONS_CSV)))?;

    let mut w = csv_file(dir, TIMINGS_CSV)?;
    w.write_record(["run", "method", "r_size", "learn_s", "predict_s", "per_prediction_s"])?;
    for r in &out.records {
        w.write_record([
            r.run.to_string(),
            r.method.name().to_string(),
            r.r_size.to_string(),
            format!("{}", r.timings.learn),
            format!("{}", r.timings.predict),
            opt(r.timings.per_prediction()),
        ])?;
    }
    w.flush().map_err(io_err(dir.join(TIMINGS_CSV)))?;
    Ok(())
}
