//! Run manifests and atomic file output.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Everything needed to rerun a command: rerunning with the same argv,
/// config and inputs reproduces the listed outputs byte for byte.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub config: serde_json::Value,
    pub inputs: Vec<InputDigest>,
    pub seed: u64,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub outputs: Vec<String>,
}

pub fn now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0.0, |d| d.as_secs_f64())
}

/// Writes through a sibling temporary file and a rename, so readers never
/// see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> io::Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

pub fn sha256_file(path: &Path) -> io::Result<String> {
    let bytes = fs::read(path)?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

/// Collects inputs and outputs of one command and writes its manifest.
pub struct Session {
    pub out_dir: PathBuf,
    manifest: RunManifest,
}

impl Session {
    pub fn new(command: &str, argv: Vec<String>, seed: u64, out_dir: PathBuf) -> Self {
        Self {
            out_dir,
            manifest: RunManifest {
                command: command.to_string(),
                argv,
                config: serde_json::Value::Null,
                inputs: Vec::new(),
                seed,
                started_unix: now(),
                finished_unix: 0.0,
                outputs: Vec::new(),
            },
        }
    }

    pub fn set_config(&mut self, config: serde_json::Value) {
        self.manifest.config = config;
    }

    pub fn input(&mut self, path: &Path) -> Result<(), CliError> {
        let shown = path.display().to_string();
        if self.manifest.inputs.iter().any(|i| i.path == shown) {
            return Ok(());
        }
        let sha256 = sha256_file(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        self.manifest.inputs.push(InputDigest { path: shown, sha256 });
        Ok(())
    }

    pub fn write_path(&mut self, path: &Path, contents: &str) -> Result<(), CliError> {
        write_atomic(path, contents.as_bytes())
            .map_err(|e| CliError::Input(format!("writing {}: {e}", path.display())))?;
        self.manifest.outputs.push(path.display().to_string());
        Ok(())
    }

    /// Writes `name` inside the output directory.
    pub fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        let path = self.out_dir.join(name);
        self.write_path(&path, contents)?;
        Ok(path)
    }

    /// Writes to `output` when given, otherwise to stdout.
    pub fn emit(&mut self, output: Option<&Path>, contents: &str) -> Result<(), CliError> {
        match output {
            Some(p) => self.write_path(p, contents),
            None => {
                print!("{contents}");
                Ok(())
            }
        }
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.manifest.finished_unix = now();
        let name = format!("{}.manifest.json", self.manifest.command);
        let path = self.out_dir.join(name);
        let mut text = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes");
        text.push('\n');
        write_atomic(&path, text.as_bytes()).map_err(|e| CliError::Input(format!("writing {}: {e}", path.display())))
    }
}
