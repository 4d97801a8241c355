//! Serialization helpers and run manifests.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use serde::{Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

/// Directory that receives output files and their manifest, when set.
pub const OUTPUT_DIR_ENV: &str = "RADO_WALK_OUT";

pub fn ser_biguint<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelDescriptor {
    Binary,
    Random { p: f64, seed: u64 },
    /// Commands that do not touch a graph.
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputDigest {
    pub name: String,
    pub sha256: String,
}

/// Everything needed to rerun a command, plus digests of what it wrote.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<String>,
    pub model: ModelDescriptor,
    /// Weight parameter as `"num/den"`, if the command has one.
    pub delta: Option<String>,
    pub caps: BTreeMap<String, u64>,
    pub tolerances: BTreeMap<String, f64>,
    pub version: String,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<OutputDigest>,
}

impl RunManifest {
    pub fn new(command: &str, args: Vec<String>, model: ModelDescriptor) -> Self {
        Self {
            command: command.to_string(),
            args,
            model,
            delta: None,
            caps: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_clock_seconds: 0.0,
            outputs: Vec::new(),
        }
    }

    pub fn record_output(&mut self, name: &str, bytes: &[u8]) {
        self.outputs.push(OutputDigest { name: name.to_string(), sha256: sha256_hex(bytes) });
    }

    /// The manifest minus wall-clock time, which is what reruns must reproduce.
    pub fn reproducible_key(&self) -> String {
        let mut m = self.clone();
        m.wall_clock_seconds = 0.0;
        serde_json::to_string(&m).expect("manifest serializes")
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// The output directory from the environment, created if missing.
pub fn output_dir() -> Result<Option<PathBuf>> {
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(d) if !d.is_empty() => {
            let p = PathBuf::from(d);
            std::fs::create_dir_all(&p).map_err(|e| io_error(&p, e))?;
            Ok(Some(p))
        }
        _ => Ok(None),
    }
}

/// Writes `name` and `<command>.manifest.json` into `dir`.
pub fn write_outputs(dir: &Path, name: &str, bytes: &[u8], manifest: &RunManifest) -> Result<()> {
    let out = dir.join(name);
    std::fs::write(&out, bytes).map_err(|e| io_error(&out, e))?;
    let m = dir.join(format!("{}.manifest.json", manifest.command));
    let text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    std::fs::write(&m, text + "\n").map_err(|e| io_error(&m, e))
}

fn io_error(p: &Path, e: std::io::Error) -> Error {
    Error::Domain(format!("{}: {e}", p.display()))
}

/// CSV with a header row; fields are written as given.
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}
