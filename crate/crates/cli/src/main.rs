//! `hemifunk`: simulate half-section data, reconstruct star bodies, and
//! compare, probe and slice the results.

mod commands;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "hemifunk", version, about = "Star-body reconstruction from half-section volumes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum ModeArg {
    Full,
    Reduced,
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum BackendArg {
    Harmonic,
    Meanvalue,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Simulate half-section volumes of a body.
    Simulate {
        /// Body spec (JSON).
        #[arg(long)]
        body: PathBuf,
        #[arg(long, value_enum, default_value = "full")]
        mode: ModeArg,
        /// Section dimension (reduced mode; full mode uses n-1).
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Number of Fibonacci hyperplane normals (full mode).
        #[arg(long, default_value_t = 500)]
        frames: usize,
        /// JSON list of hyperplane normals replacing the Fibonacci set.
        #[arg(long)]
        normals: Option<PathBuf>,
        /// v-grid resolution (reduced mode).
        #[arg(long, default_value_t = 16)]
        v_res: usize,
        /// w-grid resolution (reduced mode).
        #[arg(long, default_value_t = 16)]
        w_res: usize,
        /// Gauss points per half circle.
        #[arg(long, default_value_t = 64)]
        quadrature: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reconstruct the radial function from a dataset.
    Reconstruct {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum, default_value = "harmonic")]
        backend: BackendArg,
        /// Measure convention for the mean-value backend:
        /// probability | calibrated:K.
        #[arg(long)]
        convention: Option<String>,
        #[arg(long, default_value_t = 16)]
        l_max: usize,
        /// Output grid resolution.
        #[arg(long, default_value_t = 64)]
        resolution: usize,
        /// Resolution of the grid the data is fitted to (full mode).
        #[arg(long)]
        fit_resolution: Option<usize>,
        #[arg(long, default_value_t = 0.15)]
        band: f64,
        #[arg(long, default_value_t = 0.05)]
        theta_floor: f64,
        /// Relative misfit tolerance of the data fit.
        #[arg(long, default_value_t = 0.05)]
        fit_tol: f64,
        /// Radial table output (CSV).
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: PathBuf,
        /// Optional truth (body JSON or radial CSV) for error metrics.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Compare a radial table against a truth body or table.
    Compare {
        #[arg(long)]
        radial: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long, default_value_t = 0.15)]
        band: f64,
        /// Excludes |(theta_1, theta_2)| <= floor on S^3 outputs.
        #[arg(long, default_value_t = 0.05)]
        theta_floor: f64,
        #[arg(long)]
        report: PathBuf,
    },
    /// Print mean-value multipliers on spherical harmonics.
    Probe {
        /// Comma-separated even degrees, at most 8.
        #[arg(long, value_delimiter = ',', default_value = "0,2,4")]
        degrees: Vec<usize>,
        #[arg(long, default_value = "probability")]
        convention: String,
    },
    /// Emit a polar slice (angle, rho) of a radial table.
    PlotData {
        #[arg(long)]
        radial: PathBuf,
        /// Plane normal, comma-separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        normal: Vec<f64>,
        #[arg(long, default_value_t = 360)]
        samples: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = commands::configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
