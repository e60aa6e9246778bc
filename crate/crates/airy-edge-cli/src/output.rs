//! Artifact writing: atomic files, stdout fallback and the run manifest.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("cannot create a file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// Where a command's artifact goes.
#[derive(Debug, Clone, Default)]
pub struct Destination {
    pub out: Option<PathBuf>,
    pub manifest: Option<PathBuf>,
}

/// What a run records next to its artifact.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub params: Value,
    pub seed: Option<u64>,
    pub version: String,
    pub threads: usize,
    pub inputs: Vec<Value>,
    pub outputs: Vec<Value>,
    pub summary: Value,
}

/// The artifact of one command.
pub struct Artifact {
    pub bytes: Vec<u8>,
    pub seed: Option<u64>,
    pub summary: Value,
}

impl Artifact {
    pub fn new(bytes: Vec<u8>) -> Self {
        Self { bytes, seed: None, summary: Value::Null }
    }

    pub fn json<T: Serialize>(value: &T) -> Result<Self> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        Ok(Self::new(bytes))
    }

    pub fn seeded(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_summary(mut self, summary: Value) -> Self {
        self.summary = summary;
        self
    }
}

pub struct RunInfo<'a> {
    pub command: &'a str,
    pub argv: &'a [String],
    pub params: Value,
    pub config: Option<&'a Path>,
    pub threads: usize,
}

/// Writes the artifact to `--out` (or stdout) and the manifest to
/// `--manifest`, defaulting to `<out>.manifest.json` when `--out` is set.
pub fn emit(dest: &Destination, artifact: &Artifact, run: &RunInfo) -> Result<()> {
    let digest = sha256_hex(&artifact.bytes);
    let output = match &dest.out {
        Some(path) => {
            write_atomic(path, &artifact.bytes)?;
            json!({ "path": path, "sha256": digest })
        }
        None => {
            std::io::stdout().lock().write_all(&artifact.bytes)?;
            json!({ "path": "-", "sha256": digest })
        }
    };
    let manifest_path = dest.manifest.clone().or_else(|| {
        dest.out.as_ref().map(|p| {
            let mut s = p.clone().into_os_string();
            s.push(".manifest.json");
            PathBuf::from(s)
        })
    });
    let Some(manifest_path) = manifest_path else {
        return Ok(());
    };
    let mut inputs = Vec::new();
    if let Some(cfg) = run.config {
        let bytes = std::fs::read(cfg)?;
        inputs.push(json!({ "path": cfg, "sha256": sha256_hex(&bytes) }));
    }
    let manifest = RunManifest {
        command: run.command.into(),
        argv: run.argv.to_vec(),
        params: run.params.clone(),
        seed: artifact.seed,
        version: env!("CARGO_PKG_VERSION").into(),
        threads: run.threads,
        inputs,
        outputs: vec![output],
        summary: artifact.summary.clone(),
    };
    let mut bytes = serde_json::to_vec_pretty(&manifest)?;
    bytes.push(b'\n');
    write_atomic(&manifest_path, &bytes)
}

/// CSV cell: the shortest decimal that parses back to the same f64.
pub fn num(v: f64) -> String {
    format!("{v}")
}
