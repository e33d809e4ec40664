use serde::Serialize;
use sha2::{Digest, Sha256};
use std::time::{SystemTime, UNIX_EPOCH};

/// Provenance written next to every output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    /// `sha256:` digest of the scenario file bytes.
    pub config_digest: String,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new(subcommand: &str, config: &[u8], seed: Option<u64>, trials: Option<u64>) -> Self {
        let digest = Sha256::digest(config);
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            subcommand: subcommand.to_string(),
            config_digest: format!("sha256:{hex}"),
            seed,
            trials,
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
        }
    }
}
