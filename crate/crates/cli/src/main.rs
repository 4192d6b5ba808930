//! `mspt`: command-line front end for the mixed-state SPT toolkit.
//!
//! Every subcommand writes `<stem>.csv` (or a JSON data file) and
//! `<stem>.manifest.json` into the output directory. Exit codes: 0 ok,
//! 1 domain or I/O error, 2 usage error.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

pub use output::{Run, RunManifest};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "MSPT_OUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] mspt_core::Error),
    #[error("io: {0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) | CliError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "mspt", version, about = "Decohered cluster-state dynamics: Clifford trajectories, exact Lindbladians, closed forms")]
struct Cli {
    /// Output directory [env: MSPT_OUT_DIR, default: mspt-out]
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    /// File stem for outputs; defaults to the subcommand name.
    #[arg(long, global = true)]
    stem: Option<String>,

    /// Worker threads for trajectory ensembles (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mixing time of the strong string across a size sweep, with the log-log slope.
    MixTime(commands::MixTimeArgs),
    /// Steady-regime string order curves for a list of λ.
    StringScan(commands::StringScanArgs),
    /// Rényi-2 quantities from pairs of independent trajectories.
    TwoCopy(commands::TwoCopyArgs),
    /// Exact diagonalization of a Lindbladian.
    Ed(commands::EdArgs),
    /// Closed forms of the non-Hermitian free-fermion solution.
    Analytic(commands::AnalyticArgs),
    /// First-order perturbation theory in the pair sector.
    Rd(commands::RdArgs),
    /// Even-site X record of one trajectory.
    Defects(commands::DefectsArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::MixTime(_) => "mix-time",
            Command::StringScan(_) => "string-scan",
            Command::TwoCopy(_) => "two-copy",
            Command::Ed(_) => "ed",
            Command::Analytic(_) => "analytic",
            Command::Rd(_) => "rd",
            Command::Defects(_) => "defects",
        }
    }
}

fn parameters<A: Args + Serialize>(a: &A) -> serde_json::Value {
    serde_json::to_value(a).unwrap_or(serde_json::Value::Null)
}

fn run(cli: Cli) -> Result<(), CliError> {
    mspt_core::linalg::self_check()?;
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
    }
    let dir = cli
        .out_dir
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(output::DEFAULT_OUT_DIR));
    let name = cli.command.name();
    let stem = cli.stem.unwrap_or_else(|| name.to_string());
    let (params, seed) = match &cli.command {
        Command::MixTime(a) => (parameters(a), Some(a.seed)),
        Command::StringScan(a) => (parameters(a), Some(a.seed)),
        Command::TwoCopy(a) => (parameters(a), Some(a.seed)),
        Command::Ed(a) => (parameters(a), None),
        Command::Analytic(a) => (parameters(a), None),
        Command::Rd(a) => (parameters(a), None),
        Command::Defects(a) => (parameters(a), Some(a.seed)),
    };
    let mut run = Run::new(&dir, &stem, name, params, seed)?;
    let result = match &cli.command {
        Command::MixTime(a) => commands::mix_time(a, &mut run),
        Command::StringScan(a) => commands::string_scan(a, &mut run),
        Command::TwoCopy(a) => commands::two_copy(a, &mut run),
        Command::Ed(a) => commands::ed(a, &mut run),
        Command::Analytic(a) => commands::analytic(a, &mut run),
        Command::Rd(a) => commands::rd(a, &mut run),
        Command::Defects(a) => commands::defects(a, &mut run),
    };
    let manifest = run.finish(result.as_ref().err())?;
    match result {
        Ok(()) => {
            println!("{}", manifest.display());
            Ok(())
        }
        Err(e) => Err(e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mspt: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
