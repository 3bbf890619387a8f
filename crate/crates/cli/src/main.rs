use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser};
use collapse_cli::config::{parse_assignment, read_pairs};
use collapse_cli::{execute, replay, CliError, RunReport, Subcommand};

const THREADS_VAR: &str = "COLLAPSE_LAB_THREADS";

#[derive(Parser)]
#[command(name = "collapse-lab", version, about = "Seeded collapse-walk experiments with CSV output")]
enum Cli {
    /// Born-rule ensemble of collapse walks
    Born(Common),
    /// Individual walk trajectories
    Walk(Common),
    /// GUE entry, spacing and isotropy statistics
    Gue(Common),
    /// Splitting probabilities and the walk's diffusion limit
    Diffusion(Common),
    /// Fubini-Study distances and detector classes at the double-slit geometry
    Distance(Common),
    /// Velocity decomposition of a Gaussian packet
    Decompose(Common),
    /// Screen patterns with and without a which-way detector
    Pattern(Common),
    /// Re-run the experiment recorded in a manifest and verify checksums
    Replay {
        /// manifest.txt written by an earlier run
        manifest: PathBuf,
        /// Output directory, default: next to the manifest
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// key=value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Number of runs or samples
    #[arg(long)]
    runs: Option<u64>,
    /// Exit with code 4 unless every summary row passes
    #[arg(long)]
    check: bool,
    /// Override a configuration key, KEY=VALUE
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("{THREADS_VAR} must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

fn run_common(cmd: Subcommand, c: Common) -> Result<RunReport, CliError> {
    let mut layers = Vec::new();
    if let Some(path) = &c.config {
        layers.push(read_pairs(path)?);
    }
    let params = c.params.iter().map(|p| parse_assignment(p).map_err(CliError::Config)).collect::<Result<_, _>>()?;
    layers.push(params);
    let mut flags = Vec::new();
    if let Some(seed) = c.seed {
        flags.push(("seed".to_string(), seed.to_string()));
    }
    if let Some(runs) = c.runs {
        flags.push(("runs".to_string(), runs.to_string()));
    }
    layers.push(flags);
    let cfg = cmd.resolve(&layers)?;
    let report = execute(cmd, &cfg, &c.out)?;
    print_report(&report);
    if c.check && !report.passed() {
        let names: Vec<&str> = report.failures().iter().map(|r| r.metric.as_str()).collect();
        return Err(CliError::Check(names.join(", ")));
    }
    Ok(report)
}

fn print_report(report: &RunReport) {
    for row in &report.summary {
        println!("{row}");
    }
    println!("wrote {} ({} ms)", report.out_dir.display(), report.manifest.duration_ms);
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let (cmd, common) = match cli {
        Cli::Born(c) => (Subcommand::Born, c),
        Cli::Walk(c) => (Subcommand::Walk, c),
        Cli::Gue(c) => (Subcommand::Gue, c),
        Cli::Diffusion(c) => (Subcommand::Diffusion, c),
        Cli::Distance(c) => (Subcommand::Distance, c),
        Cli::Decompose(c) => (Subcommand::Decompose, c),
        Cli::Pattern(c) => (Subcommand::Pattern, c),
        Cli::Replay { manifest, out } => {
            let out = out.unwrap_or_else(|| manifest.parent().map(PathBuf::from).unwrap_or_default());
            let r = replay(&manifest, &out)?;
            print_report(&r.run);
            if !r.mismatched.is_empty() {
                return Err(CliError::Check(format!("outputs differ from manifest: {}", r.mismatched.join(", "))));
            }
            println!("replay identical");
            return Ok(());
        }
    };
    run_common(cmd, common).map(|_| ())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("collapse-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
