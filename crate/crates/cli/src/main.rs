mod commands;
mod manifest;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "dkho",
    version,
    about = "Quantum and classical delta-kicked harmonic oscillator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classical stochastic web: visit histogram of the stroboscopic map (CSV + PGM).
    Web(RunArgs),
    /// Evolve a coherent state under one Floquet operator; centroid trajectory and final state.
    Evolve(RunArgs),
    /// Peres overlap series with the Ramsey populations and their inversion.
    Overlap(RunArgs),
    /// Time-averaged Husimi Q function on a phase-space grid (CSV + PGM).
    Qavg(RunArgs),
    /// Quantum centroid against the classical orbit, kick by kick.
    Correspondence(RunArgs),
    /// Laboratory parameters to (eta, kappa, K) with validity diagnostics.
    Convert(RunArgs),
}

/// Settings are layered: config file, then `DKHO_*` environment variables,
/// then the flags below, then `--set` pairs.
#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// `key = value` file, or the manifest.json of an earlier run.
    #[arg(short, long)]
    pub config: Option<PathBuf>,
    /// Override any configuration key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    #[arg(long)]
    pub r: Option<u64>,
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub kappa1: Option<f64>,
    #[arg(long)]
    pub kappa2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_im: Option<f64>,
    #[arg(long)]
    pub n_kicks: Option<u64>,
    #[arg(long)]
    pub fock_dim: Option<usize>,
    /// Worker threads; results do not depend on this. Defaults to all cores.
    #[arg(short, long)]
    pub jobs: Option<usize>,
    /// Output directory, created if missing.
    #[arg(short, long, default_value = ".")]
    pub out: PathBuf,
}

fn exit_code(err: &dkho::Error) -> u8 {
    match err {
        e if e.is_config() => 2,
        dkho::Error::Io(_) => 1,
        _ => 3,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (name, args) = match &cli.command {
        Command::Web(a) => ("web", a),
        Command::Evolve(a) => ("evolve", a),
        Command::Overlap(a) => ("overlap", a),
        Command::Qavg(a) => ("qavg", a),
        Command::Correspondence(a) => ("correspondence", a),
        Command::Convert(a) => ("convert", a),
    };
    match commands::run(name, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
