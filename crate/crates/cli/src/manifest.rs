use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

/// Record of one invocation: the resolved parameters, the seed and timings.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub seed: Option<u64>,
    pub parameters: Value,
    pub outputs: Vec<String>,
    pub started_unix_seconds: f64,
    pub wall_seconds: f64,
}

impl RunManifest {
    pub fn new(command: &str, seed: Option<u64>, parameters: Value) -> Self {
        RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            parameters,
            outputs: Vec::new(),
            started_unix_seconds: unix_now(),
            wall_seconds: 0.0,
        }
    }

    pub fn finish(&mut self) {
        self.wall_seconds = (unix_now() - self.started_unix_seconds).max(0.0);
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        fs::write(path, text).map_err(|e| CliError::io(path, e))
    }
}

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}
