//! Flat `key=value` experiment configuration.
//!
//! Each subcommand declares a schema of keys with defaults and ranges.
//! Values are layered: schema defaults, then the config file, then
//! `--param` overrides, then the dedicated flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kind {
    /// Float in `[min, max]`, bounds optionally exclusive.
    Float { min: f64, max: f64, open: bool },
    Int { min: u64, max: u64 },
    Choice(&'static [&'static str]),
}

#[derive(Debug, Clone, Copy)]
pub struct KeySpec {
    pub name: &'static str,
    pub kind: Kind,
    pub default: &'static str,
    pub help: &'static str,
}

impl KeySpec {
    const fn new(name: &'static str, kind: Kind, default: &'static str, help: &'static str) -> Self {
        Self { name, kind, default, help }
    }

    fn check(&self, raw: &str) -> Result<(), String> {
        match self.kind {
            Kind::Float { min, max, open } => {
                let v: f64 = raw.parse().map_err(|_| format!("expected a number, got '{raw}'"))?;
                let inside = if open { v > min && v < max } else { v >= min && v <= max };
                if !v.is_finite() || !inside {
                    let (l, r) = if open { ('(', ')') } else { ('[', ']') };
                    return Err(format!("{v} outside {l}{min}, {max}{r}"));
                }
            }
            Kind::Int { min, max } => {
                let v: u64 = raw.parse().map_err(|_| format!("expected a non-negative integer, got '{raw}'"))?;
                if v < min || v > max {
                    return Err(format!("{v} outside [{min}, {max}]"));
                }
            }
            Kind::Choice(options) => {
                if !options.contains(&raw) {
                    return Err(format!("'{raw}' is not one of {}", options.join(", ")));
                }
            }
        }
        Ok(())
    }
}

const fn float(min: f64, max: f64) -> Kind {
    Kind::Float { min, max, open: false }
}

const fn open(min: f64, max: f64) -> Kind {
    Kind::Float { min, max, open: true }
}

const fn int(min: u64, max: u64) -> Kind {
    Kind::Int { min, max }
}

const INF: f64 = f64::INFINITY;
const MAX_RUNS: u64 = 100_000_000;

const SEED: KeySpec = KeySpec::new("seed", int(0, u64::MAX), "0", "master seed");

pub const WALK_KEYS: &[KeySpec] = &[
    SEED,
    KeySpec::new("a", open(-1e12, 1e12), "-10", "slit a position"),
    KeySpec::new("b", open(-1e12, 1e12), "10", "slit b position"),
    KeySpec::new("alpha_sq", float(0.0, 1.0), "0.25", "weight |alpha|^2 of slit a"),
    KeySpec::new("step_tau", open(0.0, INF), "1", "tau step size"),
    KeySpec::new("step_s", float(0.0, 1e6), "1", "s step size"),
    KeySpec::new("drift_h", float(0.0, 1e6), "0.5", "drift per step in s"),
    KeySpec::new("delta_detect", open(0.0, INF), "1", "detector resolution"),
    KeySpec::new("steps", Kind::Choice(&["fixed", "normal"]), "fixed", "step distribution"),
    KeySpec::new("absorb", Kind::Choice(&["joint", "tau_only"]), "joint", "absorption rule"),
    KeySpec::new("reflect_at", float(0.0, INF), "0", "spread where s is reflected, 0 = initial spread"),
    KeySpec::new("max_steps", int(1, 1_000_000_000), "1000000", "step cap per run"),
];

const LEVEL: KeySpec = KeySpec::new("level", open(0.0, 1.0), "0.99", "confidence level");

pub const GUE_KEYS: &[KeySpec] = &[
    SEED,
    KeySpec::new("runs", int(1, MAX_RUNS), "1000", "matrices sampled"),
    KeySpec::new("dim", int(2, 4096), "64", "matrix dimension"),
    KeySpec::new("scale", open(0.0, INF), "1", "entry scale d"),
    KeySpec::new("frame_size", int(4, 1024), "32", "tangent frame size for the isotropy check"),
    KeySpec::new("isotropy_samples", int(2, MAX_RUNS), "10000", "induced steps sampled"),
    KeySpec::new("dt", open(0.0, 1.0), "0.01", "evolution time per step"),
];

pub const DIFFUSION_KEYS: &[KeySpec] = &[
    SEED,
    KeySpec::new("a", open(-1e12, 1e12), "-10", "left absorbing end"),
    KeySpec::new("b", open(-1e12, 1e12), "10", "right absorbing end"),
    KeySpec::new("c", open(-1e12, 1e12), "5", "source position"),
    KeySpec::new("coefficient", open(0.0, INF), "0.5", "diffusion coefficient"),
    KeySpec::new("n_points", int(16, 1_000_000), "401", "grid points on [a, b]"),
    KeySpec::new("t_max", open(0.0, INF), "5000", "time limit for the splitting run"),
    KeySpec::new("runs", int(0, MAX_RUNS), "100000", "walks for the kernel comparison, 0 skips it"),
    KeySpec::new("n_steps", int(1, 1_000_000), "400", "steps per walk in the kernel comparison"),
];

pub const DISTANCE_KEYS: &[KeySpec] = &[
    KeySpec::new("a", open(-1.0, 1.0), "-5e-6", "slit a position"),
    KeySpec::new("b", open(-1.0, 1.0), "5e-6", "slit b position"),
    KeySpec::new("delta", open(0.0, 1.0), "1e-9", "slit width"),
    KeySpec::new("detector_length", open(0.0, 1.0), "5e-6", "detector length"),
    KeySpec::new("cell_size", open(0.0, 1.0), "1e-10", "detector cell size"),
    KeySpec::new("epsilon", open(0.0, 1.0), "1e-4", "detection tolerance"),
    KeySpec::new("alpha_sq", float(0.0, 1.0), "0.25", "weight of slit a in the superposition"),
    KeySpec::new("width_factor", open(1.0, 1e6), "100", "width ratio of the wide packet"),
    KeySpec::new("points_per_width", float(4.0, 64.0), "8", "grid points per slit width"),
];

pub const DECOMPOSE_KEYS: &[KeySpec] = &[
    KeySpec::new("potential", Kind::Choice(&["free", "harmonic"]), "free", "external potential"),
    KeySpec::new("mass", open(0.0, INF), "1", "particle mass"),
    KeySpec::new("hbar", open(0.0, INF), "1", "Planck constant"),
    KeySpec::new("omega", float(0.0, 1e6), "1", "harmonic frequency"),
    KeySpec::new("center", open(-1e6, 1e6), "0", "packet centre"),
    KeySpec::new("width", open(0.0, INF), "1", "packet width sigma"),
    KeySpec::new("momentum", open(-1e6, 1e6), "0", "packet wavenumber"),
    KeySpec::new("half_width", open(0.0, INF), "40", "grid half width"),
    KeySpec::new("n_points", int(64, 1 << 22), "4096", "grid points"),
];

pub const PATTERN_KEYS: &[KeySpec] = &[
    KeySpec::new("alpha_sq", float(0.0, 1.0), "0.5", "weight of slit a"),
    KeySpec::new("half_separation", open(0.0, INF), "2", "slit half separation"),
    KeySpec::new("sigma", open(0.0, INF), "0.2", "slit packet width"),
    KeySpec::new("time", open(0.0, INF), "40", "flight time to the screen"),
    KeySpec::new("mass", open(0.0, INF), "1", "particle mass"),
    KeySpec::new("hbar", open(0.0, INF), "1", "Planck constant"),
    KeySpec::new("half_width", open(0.0, INF), "600", "grid half width"),
    KeySpec::new("n_points", int(64, 1 << 24), "65536", "grid points"),
    KeySpec::new("stride", int(1, 1 << 20), "16", "write every stride-th point"),
];

/// Born ensembles default to the double-slit setting with 1500 runs.
pub fn born_keys() -> Vec<KeySpec> {
    let mut keys = WALK_KEYS.to_vec();
    keys.push(KeySpec::new("runs", int(1, MAX_RUNS), "1500", "ensemble size"));
    keys.push(LEVEL);
    keys
}

pub fn walk_keys() -> Vec<KeySpec> {
    let mut keys = WALK_KEYS.to_vec();
    keys.push(KeySpec::new("runs", int(1, 1000), "3", "trajectories"));
    keys
}

/// Resolved configuration: every schema key has a validated value.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    values: BTreeMap<String, String>,
}

impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.values {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

/// Parses `key=value` lines. Blank lines and `#` comments are skipped;
/// a key may appear once.
pub fn parse_pairs(text: &str, origin: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut seen = BTreeMap::new();
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = parse_assignment(line).map_err(|e| CliError::Config(format!("{origin}:{}: {e}", no + 1)))?;
        if seen.insert(k.clone(), ()).is_some() {
            return Err(CliError::Config(format!("{origin}:{}: duplicate key '{k}'", no + 1)));
        }
        out.push((k, v));
    }
    Ok(out)
}

pub fn parse_assignment(s: &str) -> Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got '{s}'"))?;
    let (k, v) = (k.trim(), v.trim());
    if k.is_empty() {
        return Err(format!("empty key in '{s}'"));
    }
    Ok((k.to_string(), v.to_string()))
}

pub fn read_pairs(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_pairs(&text, &path.display().to_string())
}

impl ExperimentConfig {
    /// Applies `layers` in order over the schema defaults.
    pub fn resolve(schema: &[KeySpec], layers: &[Vec<(String, String)>]) -> Result<Self, CliError> {
        let mut values: BTreeMap<String, String> =
            schema.iter().map(|k| (k.name.to_string(), k.default.to_string())).collect();
        for (k, v) in layers.iter().flatten() {
            if !values.contains_key(k) {
                let known: Vec<&str> = schema.iter().map(|s| s.name).collect();
                return Err(CliError::Config(format!("unknown key '{k}' (expected one of {})", known.join(", "))));
            }
            values.insert(k.clone(), v.clone());
        }
        for spec in schema {
            spec.check(&values[spec.name]).map_err(|e| CliError::Config(format!("{}: {e}", spec.name)))?;
        }
        Ok(Self { values })
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn raw(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).unwrap_or_else(|| panic!("key '{key}' missing from schema"))
    }

    pub fn f64(&self, key: &str) -> f64 {
        self.raw(key).parse().expect("validated float")
    }

    pub fn u64(&self, key: &str) -> u64 {
        self.raw(key).parse().expect("validated integer")
    }

    pub fn usize(&self, key: &str) -> usize {
        self.u64(key) as usize
    }

    pub fn seed(&self) -> Option<u64> {
        self.values.get("seed").map(|s| s.parse().expect("validated seed"))
    }
}
