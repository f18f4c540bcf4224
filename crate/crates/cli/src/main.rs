use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use randcm::pipeline::{self, RunError};
use randcm::{load_config, output_dir, write_artifacts};

#[derive(Parser)]
#[command(name = "randcm", version, about = "Center manifolds of random dynamical systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lyapunov exponents (spectrum.csv, spectrum_raw.csv, spectrum.json).
    Spectrum { config: PathBuf },
    /// Oseledets subspaces, projection norms and equivariance angles.
    Split { config: PathBuf },
    /// Center chart on the configured grid (chart.csv, solver.json).
    Manifold { config: PathBuf },
    /// Full verification report (verify.json); exit 4 if any check fails.
    Verify { config: PathBuf },
    /// List the benchmark systems.
    Catalog,
}

fn run(cli: Cli) -> Result<(), RunError> {
    let (config, cmd): (PathBuf, fn(&_) -> _) = match cli.command {
        Command::Catalog => {
            print!("{}", pipeline::catalog()?);
            return Ok(());
        }
        Command::Verify { config } => {
            let cfg = load_config(&config)?;
            let (artifacts, status) = pipeline::verify(&cfg)?;
            let dir = output_dir(&cfg);
            write_artifacts(&dir, &artifacts)?;
            eprintln!("wrote verify.json to {}", dir.display());
            return status.map_or(Ok(()), Err);
        }
        Command::Spectrum { config } => (config, pipeline::spectrum),
        Command::Split { config } => (config, pipeline::split),
        Command::Manifold { config } => (config, pipeline::manifold),
    };
    let cfg = load_config(&config)?;
    let artifacts = cmd(&cfg)?;
    let dir = output_dir(&cfg);
    write_artifacts(&dir, &artifacts)?;
    for a in &artifacts {
        eprintln!("wrote {}", dir.join(&a.name).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("randcm: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
