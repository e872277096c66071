//! Dataset ingestion, experiment sweeps, result files and oracle
//! verification behind the `robord` command.

mod error;
pub mod experiment;
pub mod ingest;
pub mod output;
pub mod verify;

pub use error::{CliError, Result};
pub use experiment::{run_experiment, ExperimentConfig, ExperimentOutput, Method, Mode, RunRecord};
pub use ingest::{ingest_csv, read_pairs, read_ratings, write_ratings};
pub use output::write_outputs;
pub use verify::{load_instance, verify, VerifyReport};
