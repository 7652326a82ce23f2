//! The `manifest.json` written next to every output.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct RunManifest<C: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub seed: Option<u64>,
    /// Resolved options after flags, config file, environment and defaults.
    pub config: C,
    /// SHA-256 of every input file, keyed by path.
    pub inputs: BTreeMap<String, String>,
}

impl<C: Serialize> RunManifest<C> {
    pub fn new(command: &'static str, seed: Option<u64>, config: C) -> Self {
        RunManifest {
            tool: "ohmnet",
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed,
            config,
            inputs: BTreeMap::new(),
        }
    }

    /// Records the digest of `path`, or of every file below it when it is
    /// a directory.
    pub fn input(&mut self, path: &Path) -> Result<()> {
        for file in files_below(path)? {
            let bytes = fs::read(&file).with_context(|| format!("reading {}", file.display()))?;
            let digest = format!("{:x}", Sha256::digest(&bytes));
            self.inputs.insert(file.display().to_string(), digest);
        }
        Ok(())
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join("manifest.json");
        let json = serde_json::to_string_pretty(self)?;
        fs::write(&path, json + "\n").with_context(|| format!("writing {}", path.display()))
    }
}

fn files_below(path: &Path) -> Result<Vec<PathBuf>> {
    if !path.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut out = Vec::new();
    let mut entries: Vec<PathBuf> = fs::read_dir(path)
        .with_context(|| format!("listing {}", path.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    entries.sort();
    for entry in entries {
        if entry.file_name().is_some_and(|n| n == "manifest.json") {
            continue;
        }
        out.extend(files_below(&entry)?);
    }
    Ok(out)
}
