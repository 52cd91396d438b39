//! Run manifests: enough provenance to replay any CLI run.

use serde::Serialize;
use std::path::Path;

use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config_digest: String,
    pub master_seed: Option<u64>,
    pub timestamp_unix: u64,
    pub outputs: Vec<String>,
    pub version: String,
    /// Canonical config text; replaying this config reproduces the run.
    pub config: String,
}

impl RunManifest {
    pub fn new(
        subcommand: &str,
        config: String,
        digest: String,
        master_seed: Option<u64>,
        outputs: Vec<String>,
    ) -> Self {
        let timestamp_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        RunManifest {
            subcommand: subcommand.to_string(),
            config_digest: digest,
            master_seed,
            timestamp_unix,
            outputs,
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
        }
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::config(format!("manifest serialization: {e}")))?;
        std::fs::write(dir.join("manifest.json"), json + "\n")?;
        Ok(())
    }
}
