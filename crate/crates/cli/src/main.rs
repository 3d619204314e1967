mod config;
mod error;
mod output;
mod pipeline;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::load_config;
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "appint", version, about = "Interpolatory subdivision symbols from approximating ones")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert the configured program into interpolatory symbols (JSON).
    Convert {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Refine a point list (CSV with x or x,y columns).
    Subdivide {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        levels: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Keep the whole support instead of the input's parameter range.
        #[arg(long)]
        full: bool,
    },
    /// Check interpolation, reproduction conditions and reproduction residuals.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Draw a refined CSV as an SVG polyline.
    Plot {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 800)]
        width: u32,
        #[arg(long, default_value_t = 600)]
        height: u32,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Convert { config, out } => {
            let cfg = load_config(&config)?;
            let seq = pipeline::convert(&cfg, out)?;
            eprintln!("converted {} levels", seq.len());
        }
        Command::Subdivide { config, points, levels, out, full } => {
            let cfg = load_config(&config)?;
            let rows = pipeline::subdivide(&cfg, &points, levels, out, full)?;
            eprintln!("wrote {} rows", rows.len());
        }
        Command::Verify { config, levels, tol, report } => {
            let cfg = load_config(&config)?;
            let rep = pipeline::verify(&cfg, levels, tol, report)?;
            eprintln!("verified {} levels, {} reproduction checks", rep.per_level.len(), rep.reproduction.len());
        }
        Command::Plot { input, out, width, height } => pipeline::plot(&input, &out, width, height)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
