//! `gqr` — batch front end for the gravitational scattering simulator.
//!
//! Reads an INI-style configuration, runs one experiment and writes
//! plot-ready CSV/JSON artifacts plus a run manifest into the output
//! directory. Exit codes: 0 success, 2 configuration error, 3 numerical
//! error, 4 I/O error.

use std::path::PathBuf;
use std::process::ExitCode as ProcessExit;

use clap::Parser;

use gqr_cli::{parse_config, run, CliError};

#[derive(Parser, Debug)]
#[command(
    name = "gqr",
    version,
    about = "Gravitational scattering off a source mass in a spatial superposition: \
             trajectories, fringe patterns, feasibility maps"
)]
struct Args {
    /// Configuration file (INI-style key = value with \[section\] headers).
    #[arg(long)]
    config: PathBuf,

    /// Output directory for data files and the run manifest.
    #[arg(long, default_value = ".")]
    out: PathBuf,

    /// Override hypothesis.rng_seed from the configuration.
    #[arg(long)]
    seed: Option<u64>,

    /// Override experiment.kind from the configuration.
    #[arg(long)]
    experiment: Option<String>,
}

fn main() -> ProcessExit {
    let args = Args::parse();
    match execute(&args) {
        Ok(()) => ProcessExit::SUCCESS,
        Err(err) => {
            // Machine-readable error category on stderr.
            eprintln!(
                "{{\"error_category\": \"{}\", \"message\": \"{}\"}}",
                err.category(),
                err.to_string().replace('\\', "\\\\").replace('"', "\\\"")
            );
            ProcessExit::from(err.exit_code() as u8)
        }
    }
}

fn execute(args: &Args) -> Result<(), CliError> {
    let threads = match std::env::var("GQR_THREADS") {
        Ok(v) => Some(v.parse::<usize>().map_err(|_| {
            CliError::Config(format!("GQR_THREADS must be a non-negative integer, got '{v}'"))
        })?),
        Err(_) => None,
    };
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", args.config.display())))?;
    let config = parse_config(&text, args.experiment.as_deref(), args.seed)?;
    let summary = run(&config, &args.out, threads)?;
    for warning in &summary.warnings {
        eprintln!("warning: {warning}");
    }
    println!(
        "{}: wrote {} file(s) to {}",
        summary.experiment.tag(),
        summary.outputs.len(),
        args.out.display()
    );
    Ok(())
}
