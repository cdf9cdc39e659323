//! Run manifests: what was run, with which seeds, and digests of every
//! output file.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

pub const MANIFEST_FILE: &str = "manifest.toml";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub generator: String,
    pub seed: u64,
    /// Replicate `i` draws from stream `(seed, streams[i])`.
    pub streams: Vec<u64>,
    pub config: RunConfig,
    /// File name to `sha256:<hex>`.
    pub files: BTreeMap<String, String>,
}

pub fn digest(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

impl RunManifest {
    pub fn new(command: &str, seed: u64, config: &RunConfig) -> Self {
        RunManifest {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            generator: celldiv::rng::GENERATOR.into(),
            seed,
            streams: (0..config.replicates).collect(),
            config: config.clone(),
            files: BTreeMap::new(),
        }
    }

    pub fn to_toml(&self) -> String {
        format!("# celldiv run manifest\n{}", toml::to_string(self).expect("manifest serializes"))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// Writes each `(name, bytes)` into `dir` and records its digest.
pub fn write_outputs(dir: &Path, files: &[(String, Vec<u8>)], manifest: &mut RunManifest) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (name, bytes) in files {
        let path = dir.join(name);
        std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        manifest.files.insert(name.clone(), digest(bytes));
    }
    let path = dir.join(MANIFEST_FILE);
    std::fs::write(&path, manifest.to_toml()).with_context(|| format!("writing {}", path.display()))
}
