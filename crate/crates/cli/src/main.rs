use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use vfd_cli::commands::{self, Globals, MoserArgs};

/// Singular diffusion with dynamic boundary conditions: runs, sweeps and
/// verification studies.
#[derive(Parser)]
#[command(name = "vfd", version)]
struct Cli {
    /// Experiment description (TOML)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory, overrides `output` in the config
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads for sweeps (0 = one per core)
    #[arg(long, global = true, value_name = "N", default_value_t = 0)]
    threads: usize,
    /// Seed for randomised perturbations, overrides `seed` in the config
    #[arg(long, global = true, value_name = "S")]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment
    Run,
    /// Run every point of the config's [sweep] section
    Sweep,
    /// Convergence ladders against the exact and manufactured solutions
    VerifyOracle,
    /// Exponent schedule of the Moser iteration
    MoserTable {
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        /// Initial exponent (defaults to the variant's)
        #[arg(long)]
        p0: Option<f64>,
        #[arg(long, default_value_t = 20)]
        i_max: usize,
        #[arg(long, default_value_t = 0.5)]
        tau: f64,
        /// u, theta or theta-boundary
        #[arg(long, default_value = "u")]
        variant: String,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::new()
        .filter_level(log::LevelFilter::Warn)
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let globals = Globals {
        config: cli.config,
        out: cli.out,
        threads: cli.threads,
        seed: cli.seed,
    };
    let result = match &cli.command {
        Command::Run => commands::run(&globals),
        Command::Sweep => commands::sweep(&globals),
        Command::VerifyOracle => commands::verify_oracle(&globals),
        Command::MoserTable {
            epsilon,
            p0,
            i_max,
            tau,
            variant,
        } => commands::moser_table(
            &globals,
            MoserArgs {
                epsilon: *epsilon,
                p0: *p0,
                i_max: *i_max,
                tau: *tau,
                variant,
            },
        ),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::error_code(&e))
        }
    }
}
