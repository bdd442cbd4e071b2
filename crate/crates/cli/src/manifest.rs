use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::Serialize;
use serde_json::Value;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Record of one command invocation, written last.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config: Value,
    pub started: String,
    pub finished: String,
    pub outputs: Vec<PathBuf>,
    pub verdicts: BTreeMap<String, bool>,
    pub exit_code: u8,
}

pub struct ManifestBuilder {
    command: String,
    config: Value,
    started: DateTime<Utc>,
    outputs: Vec<PathBuf>,
    verdicts: BTreeMap<String, bool>,
}

impl ManifestBuilder {
    pub fn new(command: &str, config: Value) -> Self {
        ManifestBuilder {
            command: command.into(),
            config,
            started: Utc::now(),
            outputs: Vec::new(),
            verdicts: BTreeMap::new(),
        }
    }

    pub fn output(&mut self, path: PathBuf) {
        self.outputs.push(path);
    }

    pub fn verdict(&mut self, name: &str, pass: bool) {
        self.verdicts.insert(name.into(), pass);
    }

    pub fn verdicts(&self) -> &BTreeMap<String, bool> {
        &self.verdicts
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.values().all(|&v| v)
    }

    /// Writes `manifest.json` into `dir` and lists it among the outputs.
    /// Paths inside `dir` are recorded relative to it.
    pub fn write(mut self, dir: &Path, exit_code: u8) -> std::io::Result<PathBuf> {
        let path = dir.join(MANIFEST_FILE);
        self.outputs.push(path.clone());
        let m = RunManifest {
            command: self.command,
            version: env!("CARGO_PKG_VERSION").into(),
            config: self.config,
            started: self.started.to_rfc3339_opts(SecondsFormat::Millis, true),
            finished: Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true),
            outputs: self
                .outputs
                .iter()
                .map(|o| o.strip_prefix(dir).map_or_else(|_| o.clone(), Path::to_path_buf))
                .collect(),
            verdicts: self.verdicts,
            exit_code,
        };
        std::fs::write(&path, serde_json::to_string_pretty(&m)? + "\n")?;
        Ok(path)
    }
}
