use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use dkho::config::Config;
use serde::Serialize;
use serde_json::Value;

/// Everything needed to reproduce a run. Feeding the file back through
/// `--config manifest.json` replays the resolved configuration.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config: BTreeMap<String, String>,
    pub outputs: Vec<PathBuf>,
    pub report: BTreeMap<String, Value>,
    pub jobs: usize,
    pub wall_time_seconds: f64,
}

impl RunManifest {
    pub fn new(command: &str, jobs: usize) -> Self {
        RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: BTreeMap::new(),
            outputs: Vec::new(),
            report: BTreeMap::new(),
            jobs,
            wall_time_seconds: 0.0,
        }
    }

    pub fn set_config(&mut self, config: &Config) {
        self.config = config
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
    }

    pub fn report(&mut self, key: &str, value: impl Into<Value>) {
        let value = value.into();
        println!("{key}: {}", display(&value));
        self.report.insert(key.to_string(), value);
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<PathBuf> {
        let path = dir.join("manifest.json");
        let mut text = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        text.push('\n');
        std::fs::write(&path, text)?;
        Ok(path)
    }
}

fn display(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
