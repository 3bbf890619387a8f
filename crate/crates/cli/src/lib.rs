//! Experiment harness around `collapse-core`.
//!
//! Every subcommand resolves a flat `key=value` configuration, runs a seeded
//! experiment, writes its CSV files and a `manifest.txt` into the output
//! directory and reports summary rows. A manifest can be replayed to
//! regenerate the same bytes.

pub mod commands;
pub mod config;
pub mod manifest;
pub mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use config::{ExperimentConfig, KeySpec};
use manifest::{sha256_hex, write_atomic, RunManifest, MANIFEST_NAME};
use output::{summary_table, SummaryRow};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("invalid parameters: {0}")]
    Model(#[from] collapse_core::Error),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("check failed: {0}")]
    Check(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Model(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Check(_) => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Born,
    Walk,
    Gue,
    Diffusion,
    Distance,
    Decompose,
    Pattern,
}

impl Subcommand {
    pub const ALL: [Subcommand; 7] = [
        Subcommand::Born,
        Subcommand::Walk,
        Subcommand::Gue,
        Subcommand::Diffusion,
        Subcommand::Distance,
        Subcommand::Decompose,
        Subcommand::Pattern,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Born => "born",
            Subcommand::Walk => "walk",
            Subcommand::Gue => "gue",
            Subcommand::Diffusion => "diffusion",
            Subcommand::Distance => "distance",
            Subcommand::Decompose => "decompose",
            Subcommand::Pattern => "pattern",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }

    pub fn schema(self) -> Vec<KeySpec> {
        match self {
            Subcommand::Born => config::born_keys(),
            Subcommand::Walk => config::walk_keys(),
            Subcommand::Gue => config::GUE_KEYS.to_vec(),
            Subcommand::Diffusion => config::DIFFUSION_KEYS.to_vec(),
            Subcommand::Distance => config::DISTANCE_KEYS.to_vec(),
            Subcommand::Decompose => config::DECOMPOSE_KEYS.to_vec(),
            Subcommand::Pattern => config::PATTERN_KEYS.to_vec(),
        }
    }

    pub fn resolve(self, layers: &[Vec<(String, String)>]) -> Result<ExperimentConfig, CliError> {
        ExperimentConfig::resolve(&self.schema(), layers)
    }

    fn run(self, cfg: &ExperimentConfig) -> Result<commands::Outputs, CliError> {
        match self {
            Subcommand::Born => commands::born(cfg),
            Subcommand::Walk => commands::walk(cfg),
            Subcommand::Gue => commands::gue(cfg),
            Subcommand::Diffusion => commands::diffusion(cfg),
            Subcommand::Distance => commands::distance(cfg),
            Subcommand::Decompose => commands::decompose(cfg),
            Subcommand::Pattern => commands::pattern(cfg),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub out_dir: PathBuf,
    pub manifest: RunManifest,
    pub summary: Vec<SummaryRow>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.summary.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> Vec<&SummaryRow> {
        self.summary.iter().filter(|r| !r.pass).collect()
    }

    pub fn path(&self, file: &str) -> PathBuf {
        self.out_dir.join(file)
    }
}

/// Runs `cmd` and writes its files, the summary and the manifest to `out_dir`.
pub fn execute(cmd: Subcommand, cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunReport, CliError> {
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let start = Instant::now();
    let mut outputs = cmd.run(cfg)?;
    outputs.files.push(summary_table(&format!("{}_summary.csv", cmd.name()), &outputs.summary));
    let mut manifest = RunManifest::new(cmd.name(), cfg, 0);
    for art in &outputs.files {
        write_atomic(&out_dir.join(&art.name), &art.bytes)?;
        manifest.checksums.insert(art.name.clone(), sha256_hex(&art.bytes));
    }
    manifest.duration_ms = start.elapsed().as_millis();
    write_atomic(&out_dir.join(MANIFEST_NAME), manifest.to_text().as_bytes())?;
    Ok(RunReport {
        out_dir: out_dir.to_path_buf(),
        manifest,
        summary: outputs.summary,
    })
}

#[derive(Debug, Clone)]
pub struct ReplayReport {
    pub run: RunReport,
    /// Files whose checksum differs from the recorded one, or that the
    /// replay did not produce.
    pub mismatched: Vec<String>,
}

/// Re-runs the experiment recorded in `manifest_path` into `out_dir` and
/// compares checksums with the recorded ones.
pub fn replay(manifest_path: &Path, out_dir: &Path) -> Result<ReplayReport, CliError> {
    let recorded = RunManifest::read(manifest_path)?;
    let cmd = Subcommand::from_name(&recorded.subcommand)
        .ok_or_else(|| CliError::Config(format!("unknown subcommand '{}' in manifest", recorded.subcommand)))?;
    let cfg = cmd.resolve(std::slice::from_ref(&recorded.config))?;
    let run = execute(cmd, &cfg, out_dir)?;
    let mut mismatched: Vec<String> = recorded
        .checksums
        .iter()
        .filter(|(file, sum)| run.manifest.checksums.get(*file) != Some(*sum))
        .map(|(file, _)| file.clone())
        .collect();
    mismatched.extend(run.manifest.checksums.keys().filter(|f| !recorded.checksums.contains_key(*f)).cloned());
    Ok(ReplayReport { run, mismatched })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for c in Subcommand::ALL {
            assert_eq!(Subcommand::from_name(c.name()), Some(c));
        }
        assert_eq!(Subcommand::from_name("replay"), None);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(CliError::Model(collapse_core::Error::EigenFailure).exit_code(), 2);
        assert_eq!(CliError::io(Path::new("x"), std::io::Error::other("x")).exit_code(), 3);
        assert_eq!(CliError::Check("x".into()).exit_code(), 4);
    }

    #[test]
    fn every_schema_resolves_with_defaults() {
        for c in Subcommand::ALL {
            c.resolve(&[]).unwrap();
        }
    }
}
