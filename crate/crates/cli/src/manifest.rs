use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use crate::job::Job;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const MANIFEST_SCHEMA: u32 = 1;

/// Everything needed to reproduce a run. Written before any result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: u32,
    pub subcommand: String,
    pub code_version: String,
    pub seed: Option<u64>,
    pub threads: usize,
    /// Fully resolved settings; the outputs are a pure function of these.
    pub job: Job,
    /// Output files relative to the manifest's directory.
    pub outputs: Vec<String>,
    pub started_unix: u64,
    /// Filled in once the run finishes.
    pub wall_clock_seconds: Option<f64>,
}

impl RunManifest {
    pub fn new(job: Job, threads: usize) -> Self {
        let started_unix = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_secs());
        Self {
            schema: MANIFEST_SCHEMA,
            subcommand: job.name().into(),
            code_version: env!("CARGO_PKG_VERSION").into(),
            seed: job.seed(),
            threads,
            outputs: job.outputs(),
            job,
            started_unix,
            wall_clock_seconds: None,
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join(MANIFEST_FILE);
        std::fs::write(&path, serde_json::to_string_pretty(self)? + "\n").with_context(|| format!("writing {}", path.display()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}
