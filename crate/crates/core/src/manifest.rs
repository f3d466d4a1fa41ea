//! Run manifests written next to every CLI output file.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::Tolerance;

pub const TOOL_NAME: &str = "rsc-fixpoint";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub tool_version: String,
    pub command: Vec<String>,
    pub seed: Option<u64>,
    pub tolerance: Tolerance,
    /// `gallery:<id>` or the DSL file path the mapping was loaded from.
    pub mapping_source: Option<String>,
    /// SHA-256 of the gallery spec or DSL file contents.
    pub mapping_source_hash: Option<String>,
    /// Seconds since the Unix epoch; `SOURCE_DATE_EPOCH` overrides the clock.
    pub timestamp: u64,
    /// Command-specific parameters, e.g. the iteration config.
    #[serde(default)]
    pub params: serde_json::Value,
}

impl RunManifest {
    pub fn new(command: Vec<String>, tolerance: Tolerance) -> Self {
        RunManifest {
            tool: TOOL_NAME.into(),
            tool_version: TOOL_VERSION.into(),
            command,
            seed: None,
            tolerance,
            mapping_source: None,
            mapping_source_hash: None,
            timestamp: timestamp(),
            params: serde_json::Value::Null,
        }
    }

    /// `<output>.manifest.json`.
    pub fn sidecar_path(output: &Path) -> PathBuf {
        let mut name = output.as_os_str().to_owned();
        name.push(".manifest.json");
        PathBuf::from(name)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::input(format!("cannot read manifest {}: {e}", path.display())))?;
        Ok(serde_json::from_str(&text)?)
    }
}

fn timestamp() -> u64 {
    if let Some(t) = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|v| v.parse().ok()) {
        return t;
    }
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}
