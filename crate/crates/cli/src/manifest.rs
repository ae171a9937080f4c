use crate::config::RunConfig;
use anyhow::Result;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Serialize)]
pub struct Artifact {
    pub path: String,
    pub complete: bool,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub experiment: &'static str,
    /// SHA-256 of the resolved configuration as JSON.
    pub config_hash: String,
    pub config: RunConfig,
    pub seed: u64,
    pub threads: usize,
    pub started_unix: u64,
    pub wall_time_s: f64,
    pub status: &'static str,
    pub error: Option<String>,
    pub artifacts: Vec<Artifact>,
    #[serde(skip)]
    clock: Option<Instant>,
}

/// SHA-256 of the resolved config, ignoring where the output goes.
pub fn config_hash(cfg: &RunConfig) -> String {
    let mut cfg = cfg.clone();
    cfg.out.clear();
    let json = serde_json::to_vec(&cfg).expect("config serializes");
    Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
}

impl Manifest {
    pub fn start(cfg: &RunConfig, threads: usize) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            experiment: cfg.experiment.name(),
            config_hash: config_hash(cfg),
            config: cfg.clone(),
            seed: cfg.seed,
            threads,
            started_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            wall_time_s: 0.0,
            status: "running",
            error: None,
            artifacts: Vec::new(),
            clock: Some(Instant::now()),
        }
    }

    /// Records an artifact before it is written; it stays flagged
    /// incomplete until [`Manifest::completed`] is called.
    pub fn pending(&mut self, path: &str) {
        self.artifacts.push(Artifact { path: path.to_string(), complete: false });
    }

    pub fn completed(&mut self, path: &str) {
        if let Some(a) = self.artifacts.iter_mut().find(|a| a.path == path) {
            a.complete = true;
        }
    }

    pub fn finish(&mut self, error: Option<String>) {
        self.wall_time_s = self.clock.map(|c| c.elapsed().as_secs_f64()).unwrap_or(0.0);
        self.status = if error.is_some() { "failed" } else { "ok" };
        self.error = error;
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::write(dir.join(MANIFEST_FILE), serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}
