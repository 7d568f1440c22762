//! `coarray`: sparse active-sensing array analysis from the command line.
//!
//! Subcommands: `analyze` (co-array, trade-off, certificates, ranks),
//! `tradeoff` (the waveform-rank curve as CSV), `recover` (exhaustive l0
//! recovery of a scene file), and `paper-repro` (the full reproduction
//! check suite).
//!
//! Exit codes: 0 success, 1 check or recovery failure, 2 parse/input error,
//! 3 subset budget exceeded, 4 ambiguity or mismatch detected.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;
pub const EXIT_AMBIGUOUS: u8 = 4;

#[derive(Parser)]
#[command(
    name = "coarray",
    version,
    about = "Sum co-array identifiability analysis for active sensing arrays"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format for stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,

    /// Directory for machine-readable output files (created if missing).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Args)]
struct GeometryArg {
    /// Geometry: a JSON file, or one of the built-ins
    /// `paper:array-I`, `paper:array-II`.
    #[arg(long)]
    geometry: String,
}

#[derive(Subcommand)]
enum Command {
    /// Report co-array structure, trade-off curve, certificates, and (with a
    /// waveform) effective ranks and the identifiability bound.
    Analyze {
        #[command(flatten)]
        geometry: GeometryArg,
        /// Waveform: a JSON file, `proof`, or `random:N_S[:SEED]`.
        #[arg(long)]
        waveform: Option<String>,
        /// Grid size V (uniform in sin(theta)).
        #[arg(long, default_value_t = 16)]
        grid: usize,
        /// Relative singular-value tolerance for rank decisions.
        #[arg(long, default_value_t = coarray::DEFAULT_RANK_TOL)]
        tol: f64,
        /// Seed used when the waveform spec omits one.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cap on exhaustive subset evaluations.
        #[arg(long, default_value_t = coarray::DEFAULT_SUBSET_BUDGET)]
        budget: u64,
        /// Also dump the virtual manifold as CSV (requires --out).
        #[arg(long)]
        dump_manifold: bool,
    },
    /// Emit the waveform-rank trade-off curve.
    Tradeoff {
        #[command(flatten)]
        geometry: GeometryArg,
    },
    /// Simulate a scene and recover it by exhaustive l0 search.
    Recover {
        #[command(flatten)]
        geometry: GeometryArg,
        /// Waveform: a JSON file, `proof`, or `random:N_S[:SEED]`.
        #[arg(long)]
        waveform: String,
        /// Scene JSON file (1-based support indices).
        #[arg(long)]
        scene: PathBuf,
        /// Sparsity cap for the search; defaults to the scene's sparsity.
        #[arg(long)]
        kmax: Option<usize>,
        /// Grid size V; defaults to the scene's grid size.
        #[arg(long)]
        grid: Option<usize>,
        /// Relative-residual feasibility tolerance.
        #[arg(long, default_value_t = coarray::DEFAULT_FEASIBILITY_TOL)]
        tol: f64,
        /// Seed used when the waveform spec omits one.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cap on exhaustive subset evaluations.
        #[arg(long, default_value_t = coarray::DEFAULT_SUBSET_BUDGET)]
        budget: u64,
    },
    /// Run every reproduction check and report pass/fail per check.
    PaperRepro {
        /// Seed for the randomized grids, waveforms, scenes, and instances.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// A command failure carrying the process exit code.
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<coarray::Error> for Failure {
    fn from(e: coarray::Error) -> Self {
        use coarray::Error::*;
        let code = match &e {
            BudgetExceeded { .. } => EXIT_BUDGET,
            NoFeasibleSupport { .. } => EXIT_CHECK_FAILED,
            _ => EXIT_INPUT,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

/// Die quietly on closed pipes (e.g. `coarray analyze ... | head`) instead of
/// panicking; the Rust runtime masks SIGPIPE by default.
fn reset_sigpipe() {
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

fn main() -> ExitCode {
    reset_sigpipe();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze {
            geometry,
            waveform,
            grid,
            tol,
            seed,
            budget,
            dump_manifold,
        } => commands::analyze(
            &geometry.geometry,
            waveform.as_deref(),
            grid,
            tol,
            seed,
            budget,
            dump_manifold,
            cli.format,
            cli.out.as_deref(),
        ),
        Command::Tradeoff { geometry } => {
            commands::tradeoff(&geometry.geometry, cli.format, cli.out.as_deref())
        }
        Command::Recover {
            geometry,
            waveform,
            scene,
            kmax,
            grid,
            tol,
            seed,
            budget,
        } => commands::recover(
            &geometry.geometry,
            &waveform,
            &scene,
            kmax,
            grid,
            tol,
            seed,
            budget,
            cli.format,
            cli.out.as_deref(),
        ),
        Command::PaperRepro { seed } => commands::paper_repro(seed, cli.format, cli.out.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
