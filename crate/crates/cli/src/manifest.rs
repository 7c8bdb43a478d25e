//! Run manifests: a small provenance record emitted by every command.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use ugcbench_core::{Error, Result};

/// What one command run read, wrote, and was configured with.
///
/// The digest covers the command name and every configuration entry
/// (flags that change behavior, including input/output paths), but not
/// execution knobs like thread count or presentation flags — two runs
/// of the same configuration always share a digest, whatever hardware
/// or verbosity they ran under.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    /// 16 hex digits, stable for identical configurations.
    pub config_digest: String,
    /// Seeds that actually influenced the run.
    pub seeds: Vec<u64>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub duration_ms: u64,
    /// Command-specific facts (best checkpoint, metric values, ...).
    #[serde(skip_serializing_if = "serde_json::Map::is_empty")]
    pub details: serde_json::Map<String, serde_json::Value>,
}

/// Where a finished manifest goes.
pub enum ManifestSink<'a> {
    /// `<path>.manifest.json`, next to the command's primary output.
    Beside(&'a Path),
    /// Exactly this file.
    At(PathBuf),
    /// No file output existed: one compact JSON line on stdout.
    Stdout,
}

impl RunManifest {
    pub fn emit(&self, sink: ManifestSink<'_>) -> Result<()> {
        let path = match sink {
            ManifestSink::Beside(primary) => {
                let mut name = primary.as_os_str().to_os_string();
                name.push(".manifest.json");
                PathBuf::from(name)
            }
            ManifestSink::At(path) => path,
            ManifestSink::Stdout => {
                let line = serde_json::to_string(self).expect("manifest serializes");
                println!("manifest {line}");
                return Ok(());
            }
        };
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }
}

/// Accumulates manifest fields while a command runs.
pub struct ManifestBuilder {
    command: String,
    config: Vec<(String, String)>,
    seeds: Vec<u64>,
    inputs: Vec<String>,
    outputs: Vec<String>,
    details: serde_json::Map<String, serde_json::Value>,
}

impl ManifestBuilder {
    pub fn new(command: &str) -> Self {
        ManifestBuilder {
            command: command.to_string(),
            config: Vec::new(),
            seeds: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            details: serde_json::Map::new(),
        }
    }

    /// Records one configuration entry; entry order feeds the digest,
    /// so call sites must be deterministic.
    pub fn config(mut self, key: &str, value: impl Display) -> Self {
        self.config.push((key.to_string(), value.to_string()));
        self
    }

    /// Records the entry only when the flag was given.
    pub fn config_opt(self, key: &str, value: Option<impl Display>) -> Self {
        match value {
            Some(v) => self.config(key, v),
            None => self,
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seeds.push(seed);
        self
    }

    pub fn seeds(mut self, seeds: &[u64]) -> Self {
        self.seeds.extend_from_slice(seeds);
        self
    }

    pub fn input(mut self, path: impl AsRef<Path>) -> Self {
        self.inputs.push(path.as_ref().display().to_string());
        self
    }

    pub fn output(mut self, path: impl AsRef<Path>) -> Self {
        self.outputs.push(path.as_ref().display().to_string());
        self
    }

    pub fn output_opt(self, path: Option<impl AsRef<Path>>) -> Self {
        match path {
            Some(p) => self.output(p),
            None => self,
        }
    }

    pub fn detail(mut self, key: &str, value: serde_json::Value) -> Self {
        self.details.insert(key.to_string(), value);
        self
    }

    pub fn finish(self, started: Instant) -> RunManifest {
        let mut blob = Vec::new();
        blob.extend_from_slice(self.command.as_bytes());
        blob.push(0);
        for (k, v) in &self.config {
            blob.extend_from_slice(k.as_bytes());
            blob.push(b'=');
            blob.extend_from_slice(v.as_bytes());
            blob.push(b'\n');
        }
        RunManifest {
            command: self.command,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config_digest: format!("{:016x}", fnv1a64(&blob)),
            seeds: self.seeds,
            inputs: self.inputs,
            outputs: self.outputs,
            duration_ms: started.elapsed().as_millis() as u64,
            details: self.details,
        }
    }
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}
