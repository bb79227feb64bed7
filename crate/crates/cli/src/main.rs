//! `lt-ising`: seeded batch experiments on random Lorentzian triangulations.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::Format;

#[derive(Debug, Parser)]
#[command(name = "lt-ising", version, about = "Seeded experiments on random Lorentzian triangulations")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args, serde::Serialize)]
pub struct Common {
    /// Master seed; identical seeds and flags reproduce every data row.
    #[arg(long, default_value_t = 1, global = true)]
    pub seed: u64,
    /// Output file. Defaults to `<subcommand>.<format>` in $LT_ISING_OUT_DIR, or stdout.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[arg(long, env = "LT_ISING_OUT_DIR", global = true, hide_env_values = true)]
    #[serde(skip)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    #[serde(skip)]
    pub workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample triangulations and report level-size histograms.
    Sample(commands::SampleArgs),
    /// Goodness of fit of sampled level sizes against the exact law.
    Stats(commands::StatsArgs),
    /// Root magnetization over a grid of inverse temperatures, both boundary conditions.
    IsingScan(commands::IsingScanArgs),
    /// Enumerate winding contours and the Peierls partial sums.
    Contours(commands::ContoursArgs),
    /// Annealed reach probabilities of disagreement percolation.
    Percolation(commands::PercolationArgs),
    /// Insertion round trips and reconstruction frequencies against their bound.
    SurgerySelftest(commands::SurgeryArgs),
    /// Exact enumeration cross-checks.
    Oracle(commands::OracleArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lt-ising: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let c = &cli.common;
    if let Some(w) = c.workers {
        anyhow::ensure!(w > 0, "--workers must be positive");
        rayon::ThreadPoolBuilder::new().num_threads(w).build_global()?;
    }
    match cli.command {
        Command::Sample(a) => commands::sample(c, a),
        Command::Stats(a) => commands::stats(c, a),
        Command::IsingScan(a) => commands::ising_scan(c, a),
        Command::Contours(a) => commands::contours(c, a),
        Command::Percolation(a) => commands::percolation(c, a),
        Command::SurgerySelftest(a) => commands::surgery(c, a),
        Command::Oracle(a) => commands::oracle(c, a),
    }
}
