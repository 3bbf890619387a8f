//! Run manifests and atomic file output.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::config::{parse_pairs, ExperimentConfig};
use crate::CliError;

pub const MANIFEST_NAME: &str = "manifest.txt";

/// Snapshot of one run: enough to repeat it and to verify its outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub subcommand: String,
    pub version: String,
    pub master_seed: Option<u64>,
    pub duration_ms: u128,
    pub config: Vec<(String, String)>,
    /// File name to lowercase hex SHA-256.
    pub checksums: BTreeMap<String, String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    let write = || -> std::io::Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    };
    write().map_err(|e| {
        let _ = fs::remove_file(&tmp);
        CliError::io(path, e)
    })
}

impl RunManifest {
    pub fn new(subcommand: &str, config: &ExperimentConfig, duration_ms: u128) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            master_seed: config.seed(),
            duration_ms,
            config: config.entries().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
            checksums: BTreeMap::new(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("subcommand={}\n", self.subcommand));
        s.push_str(&format!("version={}\n", self.version));
        match self.master_seed {
            Some(seed) => s.push_str(&format!("master_seed={seed}\n")),
            None => s.push_str("master_seed=none\n"),
        }
        s.push_str(&format!("duration_ms={}\n", self.duration_ms));
        for (k, v) in &self.config {
            s.push_str(&format!("config.{k}={v}\n"));
        }
        for (k, v) in &self.checksums {
            s.push_str(&format!("checksum.{k}={v}\n"));
        }
        s
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        let bad = |msg: String| CliError::Config(format!("{origin}: {msg}"));
        let mut m = RunManifest {
            subcommand: String::new(),
            version: String::new(),
            master_seed: None,
            duration_ms: 0,
            config: Vec::new(),
            checksums: BTreeMap::new(),
        };
        for (k, v) in parse_pairs(text, origin)? {
            if let Some(key) = k.strip_prefix("config.") {
                m.config.push((key.to_string(), v));
            } else if let Some(file) = k.strip_prefix("checksum.") {
                m.checksums.insert(file.to_string(), v);
            } else {
                match k.as_str() {
                    "subcommand" => m.subcommand = v,
                    "version" => m.version = v,
                    "master_seed" if v == "none" => m.master_seed = None,
                    "master_seed" => m.master_seed = Some(v.parse().map_err(|_| bad(format!("bad seed '{v}'")))?),
                    "duration_ms" => m.duration_ms = v.parse().map_err(|_| bad(format!("bad duration '{v}'")))?,
                    _ => return Err(bad(format!("unknown manifest key '{k}'"))),
                }
            }
        }
        if m.subcommand.is_empty() {
            return Err(bad("missing subcommand".into()));
        }
        Ok(m)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }
}
