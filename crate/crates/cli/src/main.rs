use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fpr_cli::commands::{
    effective_out_dir, run_mask, run_measure, run_phantom, run_reconstruct, run_sweep, CliError,
};
use fpr_cli::config::{resolve_text, ResolvedConfig};

/// Image reconstruction from partial Fourier samples by alternating
/// projections: phantom generation, radial-line measurement,
/// filter-regularized reconstruction and parameter sweeps.
#[derive(Parser)]
#[command(name = "fpr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rasterize the modified Shepp-Logan phantom (PGM + exact container).
    Phantom {
        /// Grid side in pixels (overrides run.n from the config).
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Generate the radial-line sampling mask.
    Mask {
        #[arg(long)]
        n: Option<usize>,
        /// Number of radial lines (overrides sampling.lines).
        #[arg(long)]
        lines: Option<usize>,
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Measure the phantom: write observation, mask and exact reference.
    Measure {
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        /// Print the fully resolved configuration and exit.
        #[arg(long)]
        print_config: bool,
    },
    /// Reconstruct from the observation (generated or loaded).
    Reconstruct {
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        /// Print the fully resolved configuration and exit.
        #[arg(long)]
        print_config: bool,
    },
    /// Run a parameter-grid sweep and write a summary CSV.
    Sweep {
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        /// Print the fully resolved base configuration and exit.
        #[arg(long)]
        print_config: bool,
    },
}

fn load_config(path: &Option<PathBuf>, allow_sweep: bool) -> Result<ResolvedConfig, CliError> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(fpr_core::Error::from)?,
        None => String::new(),
    };
    Ok(resolve_text(&text, allow_sweep)?)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Phantom { n, config, out } => {
            let rc = load_config(&config, false)?;
            let n = n.unwrap_or(rc.run.n);
            run_phantom(n, &effective_out_dir(&rc.run, &out))
        }
        Command::Mask { n, lines, config, out } => {
            let rc = load_config(&config, false)?;
            let n = n.unwrap_or(rc.run.n);
            let lines = lines.unwrap_or(rc.run.lines);
            run_mask(n, lines, &effective_out_dir(&rc.run, &out))
        }
        Command::Measure { config, out, print_config } => {
            let rc = load_config(&config, false)?;
            if print_config {
                print!("{}", rc.print());
                return Ok(());
            }
            run_measure(&rc.run, &effective_out_dir(&rc.run, &out))
        }
        Command::Reconstruct { config, out, print_config } => {
            let rc = load_config(&config, false)?;
            if print_config {
                print!("{}", rc.print());
                return Ok(());
            }
            run_reconstruct(&rc.run, &effective_out_dir(&rc.run, &out), false).map(|_| ())
        }
        Command::Sweep { config, out, print_config } => {
            let rc = load_config(&config, true)?;
            if print_config {
                print!("{}", rc.print());
                return Ok(());
            }
            run_sweep(&rc, &effective_out_dir(&rc.run, &out))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            // Keep the codes stable: 2 config, 3 divergence, 1 I/O.
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
