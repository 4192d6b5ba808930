//! Output files and run manifests.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::CliError;

/// Default output directory when neither `--out-dir` nor the environment sets one.
pub const DEFAULT_OUT_DIR: &str = "mspt-out";

/// Sidecar JSON describing one CLI invocation.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub parameters: serde_json::Value,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub outputs: Vec<String>,
    pub wall_clock_seconds: f64,
    pub status: String,
    pub error: Option<String>,
    /// Subcommand-specific summaries such as fits.
    pub extra: serde_json::Value,
}

/// Where one run writes, plus the bookkeeping needed for its manifest.
pub struct Run {
    dir: PathBuf,
    stem: String,
    subcommand: String,
    parameters: serde_json::Value,
    seed: Option<u64>,
    outputs: Vec<String>,
    extra: serde_json::Value,
    started: Instant,
}

impl Run {
    pub fn new(dir: &Path, stem: &str, subcommand: &str, parameters: serde_json::Value, seed: Option<u64>) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        Ok(Run {
            dir: dir.to_path_buf(),
            stem: stem.to_string(),
            subcommand: subcommand.to_string(),
            parameters,
            seed,
            outputs: Vec::new(),
            extra: serde_json::Value::Null,
            started: Instant::now(),
        })
    }

    fn path(&self, suffix: &str) -> PathBuf {
        self.dir.join(format!("{}{suffix}", self.stem))
    }

    pub fn write_csv<T: Serialize>(&mut self, rows: &[T]) -> Result<PathBuf, CliError> {
        let path = self.path(".csv");
        mspt_core::io::write_csv_file(&path, rows)?;
        self.outputs.push(path.display().to_string());
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, suffix: &str, value: &T) -> Result<PathBuf, CliError> {
        let path = self.path(suffix);
        write_pretty(&path, value)?;
        self.outputs.push(path.display().to_string());
        Ok(path)
    }

    pub fn set_extra(&mut self, extra: serde_json::Value) {
        self.extra = extra;
    }

    /// Writes the manifest; `error` marks the run as failed.
    pub fn finish(self, error: Option<&CliError>) -> Result<PathBuf, CliError> {
        let path = self.path(".manifest.json");
        let manifest = RunManifest {
            subcommand: self.subcommand,
            parameters: self.parameters,
            seed: self.seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: self.outputs,
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
            status: if error.is_some() { "failed" } else { "ok" }.to_string(),
            error: error.map(|e| e.to_string()),
            extra: self.extra,
        };
        write_pretty(&path, &manifest)?;
        Ok(path)
    }
}

fn write_pretty<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    fs::write(path, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
