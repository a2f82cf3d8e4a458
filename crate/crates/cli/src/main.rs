use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use qhedge::config::parse_config;
use qhedge::runner::{run, set_fast, Subcommand};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Command {
    Spectrum,
    Classify,
    EdgeBranches,
    KernelCheck,
    Decoupling,
    Wegner,
    Theorem1,
    Hall,
    Diagnostics,
}

impl From<Command> for Subcommand {
    fn from(c: Command) -> Self {
        match c {
            Command::Spectrum => Subcommand::Spectrum,
            Command::Classify => Subcommand::Classify,
            Command::EdgeBranches => Subcommand::EdgeBranches,
            Command::KernelCheck => Subcommand::KernelCheck,
            Command::Decoupling => Subcommand::Decoupling,
            Command::Wegner => Subcommand::Wegner,
            Command::Theorem1 => Subcommand::Theorem1,
            Command::Hall => Subcommand::Hall,
            Command::Diagnostics => Subcommand::Diagnostics,
        }
    }
}

/// Edge and bulk eigenstates of a random magnetic Schrödinger operator on a cylinder.
///
/// Exit status: 0 on success, 2 when an acceptance surrogate fails, 1 on error.
#[derive(Parser, Debug)]
#[command(name = "qhedge", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Number of realizations (overrides `seeds.count`).
    #[arg(long)]
    seeds: Option<u64>,
    /// Seed base (overrides `seed_base`).
    #[arg(long)]
    seed_base: Option<u64>,
    /// Run directory (overrides `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 1 selects the reference path.
    #[arg(long)]
    threads: Option<usize>,
    /// Band-projected Wegner mode.
    #[arg(long)]
    fast: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn execute(cli: &Cli) -> Result<u8, String> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())?;
    }
    let doc = std::fs::read_to_string(&cli.config).map_err(|e| format!("{}: {e}", cli.config.display()))?;
    let mut cfg = parse_config(&doc).map_err(|e| e.to_string())?;
    if let Some(n) = cli.seeds {
        cfg.seeds.count = n;
    }
    if let Some(k) = cli.seed_base {
        cfg.model.seed_base = k;
    }
    if let Some(o) = &cli.out {
        cfg.out = o.display().to_string();
    }
    if cli.fast {
        set_fast(&mut cfg);
    }
    let dir = PathBuf::from(&cfg.out);
    let outcome = run(cli.command.into(), &cfg, &dir).map_err(|e| format!("{}: {e}", Subcommand::from(cli.command)))?;
    println!("{}: {} ({})", outcome.subcommand, if outcome.pass { "pass" } else { "surrogate failure" }, dir.display());
    Ok(outcome.exit_code() as u8)
}
