use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Provenance written next to every output as `<output>.manifest.json`.
#[derive(Debug, Serialize)]
pub struct RunManifest<'a, P: Serialize> {
    pub command: &'a str,
    pub params: &'a P,
    /// Input path to SHA-256 hex digest.
    pub inputs: &'a BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub version: &'static str,
}

/// Input files read so far and their digests.
#[derive(Debug, Default)]
pub struct Inputs {
    pub digests: BTreeMap<String, String>,
}

impl Inputs {
    pub fn read(&mut self, path: &Path) -> Result<Vec<u8>, CliError> {
        let bytes = fs::read(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        self.digests.insert(path.display().to_string(), hex::encode(Sha256::digest(&bytes)));
        Ok(bytes)
    }
}

/// Outputs are collected in memory and written only once everything has
/// been computed and validated.
#[derive(Debug, Default)]
pub struct Outputs {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Outputs {
    pub fn add(&mut self, path: &Path, bytes: Vec<u8>) {
        self.files.push((path.to_path_buf(), bytes));
    }

    pub fn add_with_manifest<P: Serialize>(
        &mut self,
        path: &Path,
        bytes: Vec<u8>,
        manifest: &RunManifest<'_, P>,
    ) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(manifest).map_err(|e| CliError::Validation(e.to_string()))?;
        text.push('\n');
        self.add(path, bytes);
        self.add(&manifest_path(path), text.into_bytes());
        Ok(())
    }

    pub fn write_all(self) -> Result<(), CliError> {
        for (path, bytes) in self.files {
            write_atomic(&path, &bytes)?;
        }
        Ok(())
    }
}

pub fn manifest_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    path.with_file_name(name)
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("cannot write {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.flush().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
