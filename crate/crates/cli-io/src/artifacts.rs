//! Deterministic output artifacts: CSV tables, JSON reports, field
//! snapshots, and the manifest that fingerprints them.
//!
//! Every artifact is serialized to bytes in memory, hashed, and then
//! written — single-threaded, in the order the experiment produced it.
//! The manifest lists each file with its SHA-256 and records the config
//! hash, the seeds, and the crate versions, so two runs agree exactly
//! when their manifests agree.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spectral_core::{write_g2sf, Field64};

use crate::config::{sha256_hex, RunConfig};
use crate::error::CliError;

/// Name of the manifest file every command writes last.
pub const MANIFEST_NAME: &str = "manifest.json";

/// One output file's fingerprint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileRecord {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

/// The run fingerprint written alongside the artifacts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub config_sha256: String,
    /// Seeds the run actually used (after any command-line override).
    pub seeds: BTreeMap<String, u64>,
    pub versions: BTreeMap<String, String>,
    pub files: Vec<FileRecord>,
}

/// Versions of every crate in the toolchain, keyed by crate name.
pub fn crate_versions() -> BTreeMap<String, String> {
    let mut v = BTreeMap::new();
    v.insert("spectral-core".into(), spectral_core::VERSION.into());
    v.insert("coefficients".into(), coefficients::VERSION.into());
    v.insert("dynamics".into(), dynamics::VERSION.into());
    v.insert("asymptotics".into(), asymptotics::VERSION.into());
    v.insert("rate-function".into(), rate_function::VERSION.into());
    v.insert("cli-io".into(), env!("CARGO_PKG_VERSION").into());
    v
}

/// Collects artifacts under one directory and fingerprints them.
pub struct OutputWriter {
    dir: PathBuf,
    files: Vec<FileRecord>,
}

impl OutputWriter {
    /// Create the output directory (and parents) and start a fresh
    /// manifest.
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| {
            CliError::Config(format!("cannot create output directory {}: {e}", dir.display()))
        })?;
        Ok(OutputWriter {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    /// Directory artifacts land in.
    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Write raw bytes as a named artifact and record its fingerprint.
    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, bytes)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
        self.files.push(FileRecord {
            name: name.to_string(),
            bytes: bytes.len() as u64,
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    /// Write a CSV artifact: a header row followed by string records.
    pub fn write_csv<R>(&mut self, name: &str, header: &[&str], rows: R) -> Result<(), CliError>
    where
        R: IntoIterator<Item = Vec<String>>,
    {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)
            .map_err(|e| CliError::Config(format!("csv serialization failed: {e}")))?;
        for row in rows {
            w.write_record(&row)
                .map_err(|e| CliError::Config(format!("csv serialization failed: {e}")))?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| CliError::Config(format!("csv serialization failed: {e}")))?;
        self.write_bytes(name, &bytes)
    }

    /// Write a pretty-printed JSON artifact.
    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut bytes = serde_json::to_vec_pretty(value)
            .map_err(|e| CliError::Config(format!("json serialization failed: {e}")))?;
        bytes.push(b'\n');
        self.write_bytes(name, &bytes)
    }

    /// Write a field snapshot in the binary snapshot format.
    pub fn write_snapshot(&mut self, name: &str, field: &Field64) -> Result<(), CliError> {
        let mut bytes = Vec::new();
        write_g2sf(field, &mut bytes)?;
        self.write_bytes(name, &bytes)
    }

    /// Write the manifest and finish the run.  The manifest itself is not
    /// listed among the files.
    pub fn finish(self, command: &str, config: &RunConfig) -> Result<Manifest, CliError> {
        let mut seeds = BTreeMap::new();
        seeds.insert("root".into(), config.ensemble.root_seed);
        seeds.insert("initial".into(), config.initial.seed);
        seeds.insert("noise_shapes".into(), config.noise.shape_seed);
        let manifest = Manifest {
            command: command.to_string(),
            config_sha256: config.config_sha256.clone(),
            seeds,
            versions: crate_versions(),
            files: self.files,
        };
        let mut bytes = serde_json::to_vec_pretty(&manifest)
            .map_err(|e| CliError::Config(format!("json serialization failed: {e}")))?;
        bytes.push(b'\n');
        let path = self.dir.join(MANIFEST_NAME);
        fs::write(&path, &bytes)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
        Ok(manifest)
    }
}

/// Render a float for CSV output: shortest representation that parses
/// back to the same bits, so artifacts are reproducible byte for byte.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else if v.is_nan() {
        "NaN".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}
