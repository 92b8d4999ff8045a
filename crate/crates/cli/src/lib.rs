//! The `okvalid` command-line tool: solve, validate, check, sweep, render
//! and walk Ohta-Kawasaki equilibria.

pub mod commands;
pub mod files;
pub mod seed;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use okvalid_core::operator::Param;

pub const EXIT_VALID: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_CERT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "okvalid", version, about = "Validated equilibria of the Ohta-Kawasaki equation on (0,1)^d")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the embedding constants, optionally recomputing C̄_m.
    Constants {
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        recompute: bool,
        #[arg(long, default_value_t = okvalid_core::embeddings::DEFAULT_NCUT)]
        ncut: usize,
    },
    /// Compute an approximate equilibrium by Galerkin Newton iteration.
    Solve(SolveArgs),
    /// Validate a solution file and write a certificate.
    Validate(ValidateArgs),
    /// Re-check every inequality of a certificate from its stored numbers.
    Check {
        #[arg(long)]
        cert: PathBuf,
        /// Solution file the certificate should belong to.
        #[arg(long)]
        solution: Option<PathBuf>,
    },
    /// Validate one solution at several truncations; CSV output.
    Sweep(SweepArgs),
    /// Sample a solution on a grid; CSV output.
    Render {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        grid: usize,
        /// Value of the last coordinate for three-dimensional slices.
        #[arg(long, default_value_t = 0.5)]
        slice: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Natural-parameter stepping from a solution file.
    Walk(WalkArgs),
}

#[derive(Debug, clap::Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub dim: usize,
    /// Truncation: modes with 0 < |k|_inf < N (default 64, 28, 12 for d = 1, 2, 3).
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub mu: f64,
    /// Initial guess: `zero`, `mode:K[,A]` (K like 1 or 2x1, A default 0.2),
    /// several modes joined by `+`, or `file:PATH`.
    #[arg(long, default_value = "mode:1", allow_hyphen_values = true)]
    pub seed: String,
    /// Nonlinearity coefficients, constant term first (default 0,1,0,-1).
    #[arg(long, allow_hyphen_values = true)]
    pub f: Option<String>,
    #[arg(long, default_value_t = 60)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 1.0)]
    pub damping: f64,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, clap::Args)]
pub struct BoxArgs {
    /// Initial state box radius d_u (default 0.1 max(1, |u|_H2)).
    #[arg(long)]
    pub du: Option<f64>,
    /// Initial parameter box radius d_p (default 0.05 max(1, |p|)).
    #[arg(long)]
    pub dp: Option<f64>,
    /// Keep the box fixed instead of adapting it to the radii.
    #[arg(long)]
    pub fixed_box: bool,
}

#[derive(Debug, clap::Args)]
pub struct ValidateArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_parser = parse_param)]
    pub param: Param,
    /// Fixed truncation; chosen automatically when absent.
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Largest truncation for the automatic choice.
    #[arg(long)]
    pub n_max: Option<usize>,
    #[command(flatten)]
    pub bx: BoxArgs,
    /// Certificate file (default: next to the input, named after the parameter).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct SweepArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_parser = parse_param)]
    pub param: Param,
    /// Comma-separated truncations.
    #[arg(long = "Nlist")]
    pub nlist: String,
    #[command(flatten)]
    pub bx: BoxArgs,
    /// Also write one certificate per truncation into this directory.
    #[arg(long)]
    pub cert_dir: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct WalkArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_parser = parse_param)]
    pub param: Param,
    #[arg(long, allow_hyphen_values = true)]
    pub step: f64,
    #[arg(long)]
    pub count: usize,
    /// Truncation (default: the input's extent).
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

fn parse_param(s: &str) -> Result<Param, String> {
    s.parse::<Param>().map_err(|e| e.to_string())
}

/// Caps the rayon pool at `OKVALID_THREADS` if set.
fn configure_threads() {
    if let Some(n) = std::env::var("OKVALID_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // Fails only if the pool already exists, e.g. on a second call
        // within one process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Runs the tool on `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_VALID };
        }
    };
    configure_threads();
    match commands::dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    }
}
