use std::collections::BTreeMap;

use fglab::coloring::Mode;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Everything that determines a run's output. Two runs with equal manifests
/// produce byte-identical artifacts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Command parameters as parsed.
    pub params: Value,
    /// Input path to SHA-256 of its contents.
    pub inputs: BTreeMap<String, String>,
    pub seed: u64,
    pub mode: Mode,
    pub tool_version: String,
}

impl RunManifest {
    pub fn new(command: &str, params: Value, seed: u64, mode: Mode) -> Self {
        RunManifest {
            command: command.to_string(),
            params,
            inputs: BTreeMap::new(),
            seed,
            mode,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn record_input(&mut self, path: &str, bytes: &[u8]) {
        self.inputs.insert(path.to_string(), sha256_hex(bytes));
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
