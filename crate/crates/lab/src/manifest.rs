//! Run manifests written next to every output file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::LabResult;

/// Everything needed to reproduce and verify one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    /// Resolved parameters, including defaults and derived values.
    pub parameters: Value,
    pub version: String,
    pub format: String,
    pub output: Option<PathBuf>,
    pub rows: usize,
    /// Wall-clock time of the whole run.
    pub elapsed_ms: f64,
    /// SHA-256 of the output with timing columns removed.
    pub digest: String,
}

impl RunManifest {
    pub fn write(&self, path: &Path) -> LabResult<()> {
        let mut bytes = serde_json::to_vec_pretty(self)?;
        bytes.push(b'\n');
        std::fs::write(path, bytes)?;
        Ok(())
    }

    pub fn read(path: &Path) -> LabResult<Self> {
        Ok(serde_json::from_slice(&std::fs::read(path)?)?)
    }
}

/// `<out>.manifest.json`
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}
