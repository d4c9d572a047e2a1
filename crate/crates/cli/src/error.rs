use std::path::PathBuf;

use thiserror::Error;

/// Infrastructure failures. Any of these ends the process with status 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error{} at `{path}`: {msg}", line_suffix(*.line))]
    Config { line: usize, path: String, msg: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: line {line}: {msg}")]
    Csv { path: PathBuf, line: usize, msg: String },
    #[error(transparent)]
    Core(#[from] contrast_asym::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn line_suffix(line: usize) -> String {
    if line == 0 {
        String::new()
    } else {
        format!(" (line {line})")
    }
}

impl CliError {
    pub fn config(line: usize, path: &str, msg: impl ToString) -> Self {
        CliError::Config { line, path: path.to_string(), msg: msg.to_string() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}
