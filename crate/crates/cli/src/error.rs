use std::path::PathBuf;

use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0} contains no data rows")]
    EmptyFile(String),
    #[error("malformed header: {0}")]
    Header(String),
    #[error("row {row}, column {column}: {message}")]
    Cell {
        row: u64,
        column: String,
        message: String,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] robord_core::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::EmptyFile(_) => "empty_file",
            CliError::Header(_) => "header",
            CliError::Cell { .. } => "malformed_cell",
            CliError::Csv(_) => "csv",
            CliError::Json(_) => "json",
            CliError::Config(_) => "config",
            CliError::Core(_) => "core",
            CliError::Usage(_) => "usage",
        }
    }

    /// The machine-readable form printed on stderr.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Report<'a> {
            error: &'a str,
            message: String,
        }
        serde_json::to_string(&Report {
            error: self.kind(),
            message: self.to_string(),
        })
        .expect("plain strings serialize")
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
    let path = path.into();
    move |source| CliError::Io { path, source }
}
