use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use marriage_cli::{run, CliError, Command, ExperimentConfig, Overrides};

#[derive(Parser)]
#[command(
    name = "marriage",
    version,
    about = "Stable allocation, Boolean domination and percolation experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    /// TOML configuration file; built-in defaults when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Parent directory of the run directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    replicas: Option<usize>,
    /// Alpha grid as lo:hi:step.
    #[arg(long = "alpha-grid", global = true)]
    alpha_grid: Option<String>,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Gale-Shapley allocation per replica, with phase diagnostics.
    Allocate,
    /// Dominating radii and their tail statistics.
    Boolean,
    /// Connected components of the claimed, unclaimed and Boolean sets.
    Percolate,
    /// Crossing probability over the alpha grid.
    Sweep,
    /// Phase classification, Chernoff and Nagaev tables.
    Bounds,
    /// The invariant suite.
    Validate,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::Allocate => Command::Allocate,
            Sub::Boolean => Command::Boolean,
            Sub::Percolate => Command::Percolate,
            Sub::Sweep => Command::Sweep,
            Sub::Bounds => Command::Bounds,
            Sub::Validate => Command::Validate,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(path) => {
            println!("{}", path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: &Cli) -> Result<PathBuf, CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    let overrides = Overrides {
        seed: cli.seed,
        out: cli.out.clone(),
        replicas: cli.replicas,
        alpha_grid: cli.alpha_grid.clone(),
    };
    let config = ExperimentConfig::load(cli.config.as_deref(), &overrides)?;
    run(cli.command.into(), &config)
}
