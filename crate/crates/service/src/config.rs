use geokg_core::dgg::{LevelRange, COVERING_CAP};
use geokg_core::ingest::IngestOptions;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ServiceConfig {
    pub port: u16,
    /// Holds the persisted store and the GeoJSON files manifests refer to.
    pub data_dir: PathBuf,
    /// Levels for manifests that do not name their own.
    pub levels: LevelRange,
    pub covering_cap: usize,
    /// Violations tolerated before an ingest is refused.
    pub max_violations: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            port: 7878,
            data_dir: PathBuf::from("data"),
            levels: LevelRange::default(),
            covering_cap: COVERING_CAP,
            max_violations: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("data directory {path} is not writable: {message}")]
    DataDir { path: String, message: String },
}

impl ServiceConfig {
    /// File settings (or defaults), then `KWG_PORT` and `KWG_DATA_DIR`.
    pub fn load(path: Option<&Path>) -> Result<ServiceConfig, ConfigError> {
        let mut config = match path {
            None => ServiceConfig::default(),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| ConfigError::Read { path: p.display().to_string(), message: e.to_string() })?;
                serde_json::from_str(&text).map_err(|e| ConfigError::Invalid(e.to_string()))?
            }
        };
        config.apply_env(|k| std::env::var(k).ok())?;
        config.validate()?;
        Ok(config)
    }

    pub fn apply_env(&mut self, get: impl Fn(&str) -> Option<String>) -> Result<(), ConfigError> {
        if let Some(port) = get("KWG_PORT") {
            self.port = port.trim().parse().map_err(|_| ConfigError::Invalid(format!("KWG_PORT={port:?} is not a port")))?;
        }
        if let Some(dir) = get("KWG_DATA_DIR") {
            self.data_dir = PathBuf::from(dir);
        }
        Ok(())
    }

    /// Checks the port and creates the data directory, probing that it can
    /// be written.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.port == 0 {
            return Err(ConfigError::Invalid("port must be in 1..=65535".into()));
        }
        if self.covering_cap == 0 {
            return Err(ConfigError::Invalid("covering_cap must be positive".into()));
        }
        let fail = |e: std::io::Error| ConfigError::DataDir { path: self.data_dir.display().to_string(), message: e.to_string() };
        std::fs::create_dir_all(&self.data_dir).map_err(fail)?;
        let probe = self.data_dir.join(".write-probe");
        std::fs::write(&probe, b"").map_err(fail)?;
        std::fs::remove_file(&probe).map_err(fail)
    }

    pub fn store_path(&self) -> PathBuf {
        self.data_dir.join("store.nq")
    }

    pub fn ingest_options(&self) -> IngestOptions {
        IngestOptions { max_violations: self.max_violations, covering_cap: self.covering_cap, levels: self.levels }
    }
}
