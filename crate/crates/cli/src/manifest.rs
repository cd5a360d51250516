use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, Result};

pub const FILE_NAME: &str = "manifest.json";

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Value,
    pub master_seed: Option<u64>,
    pub version: String,
    pub timestamp: String,
    /// Settings that were not given and took the tool's defaults.
    pub defaults_used: Vec<String>,
    pub files: Vec<String>,
}

impl RunManifest {
    pub fn new(
        command: &str,
        config: Value,
        master_seed: Option<u64>,
        defaults_used: Vec<String>,
    ) -> Self {
        RunManifest {
            command: command.to_string(),
            config,
            master_seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            defaults_used,
            files: Vec::new(),
        }
    }
}

/// Collects output files in one directory and writes the manifest last.
pub struct Outputs {
    dir: PathBuf,
    manifest: RunManifest,
}

impl Outputs {
    pub fn create(dir: &Path, manifest: RunManifest) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|source| CliError::Output {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(Outputs {
            dir: dir.to_path_buf(),
            manifest,
        })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|source| CliError::Output {
            path: path.clone(),
            source,
        })?;
        self.manifest.files.push(name.to_string());
        Ok(path)
    }

    pub fn finish(self) -> Result<()> {
        let path = self.dir.join(FILE_NAME);
        let text = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes");
        fs::write(&path, text + "\n").map_err(|source| CliError::Output { path, source })
    }
}
