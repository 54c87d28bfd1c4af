//! Batch command-line front end: parse JSON state files, run divergence
//! and coding computations, and emit CSV rows (12 significant digits) with
//! reproducible provenance.
//!
//! Exit codes: 0 success, 1 replay mismatch, 2 input error, 3 numerical
//! failure.

mod commands;
mod record;
mod schema;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub exit_code: u8,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            exit_code: 2,
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            exit_code: 3,
        }
    }

    pub fn mismatch(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            exit_code: 1,
        }
    }
}

impl From<qitlab::Error> for CliError {
    fn from(e: qitlab::Error) -> Self {
        match e {
            qitlab::Error::NonConvergence { .. } => CliError::numerical(e.to_string()),
            other => CliError::input(other.to_string()),
        }
    }
}

// ---------------------------------------------------------------------------
// Argument surface
// ---------------------------------------------------------------------------

#[derive(Debug, Parser)]
#[command(
    name = "qitlab",
    version,
    about = "Batch experiments in one-shot quantum information theory: divergences, channel coding with pretty-good-measurement decoding, hypothesis testing, and source coding with quantum side information"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Seed for all randomized experiments.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Relative eigenvalue threshold deciding numerical rank / support.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol_rank: f64,

    /// Uniform grid candidates for information-spectrum computations.
    #[arg(long, global = true, default_value_t = 4001)]
    pub grid_points: usize,

    /// Bisection width (bits) at which spectrum refinement stops.
    #[arg(long, global = true, default_value_t = 1e-4)]
    pub refine_tol: f64,

    /// Worker threads (0 = automatic). Affects speed only, never results.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    /// Write a replayable run record (JSON) to this path.
    #[arg(long, global = true)]
    pub record: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WhichDivergence {
    /// Relative entropy (bits).
    D,
    /// Collision divergence (bits).
    D2,
    /// Information variance (bits squared).
    V,
    /// Information-spectrum relative entropy at --epsilon (bits).
    Ds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RunMode {
    /// Enumerate every codebook / hash function.
    Exact,
    /// Seeded Monte Carlo.
    Mc,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a divergence between two named density matrices.
    Divergence {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        rho: String,
        #[arg(long)]
        sigma: String,
        #[arg(long, value_enum)]
        which: WhichDivergence,
        /// Mass threshold for the information spectrum (required for ds).
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Channel-coding experiment: random codebooks, pretty-good-measurement
    /// decoding, lower bound vs measured success.
    Channel {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        channel: String,
        /// Comma-separated input distribution (default: uniform).
        #[arg(long)]
        input_dist: Option<String>,
        /// Number of messages.
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum)]
        mode: RunMode,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Target average error for the achievable message count.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Spectrum mass threshold for the achievable message count.
        #[arg(long)]
        delta: Option<f64>,
    },
    /// One-shot hypothesis test between two named states.
    Hyptest {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        rho: String,
        #[arg(long)]
        sigma: String,
        #[arg(long)]
        epsilon: f64,
    },
    /// Source coding with quantum side information over random hashes.
    Sw {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        source: String,
        /// Bin count; omit to derive it from --epsilon/--delta.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, value_enum)]
        mode: RunMode,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Second-order rate estimates n D + sqrt(n V) Phi^-1(eps) for a pair
    /// of states, with the exact spectrum value when the pair commutes.
    SecondOrder {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        rho: String,
        #[arg(long)]
        sigma: String,
        #[arg(long)]
        epsilon: f64,
        /// Comma-separated copy counts, e.g. 64,256,1024.
        #[arg(long)]
        n: String,
    },
    /// Re-execute a recorded run and verify bit-identical output.
    Replay {
        /// Path to a run record written with --record.
        path: PathBuf,
    },
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

/// Execute a parsed invocation, returning the CSV text for stdout.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    let opts = commands::GlobalOpts {
        seed: cli.seed,
        tol_rank: cli.tol_rank,
        grid_points: cli.grid_points,
        refine_tol: cli.refine_tol,
        threads: if cli.threads == 0 {
            None
        } else {
            Some(cli.threads)
        },
    };
    match &cli.command {
        Command::Divergence {
            file,
            rho,
            sigma,
            which,
            epsilon,
        } => commands::cmd_divergence(file, rho, sigma, *which, *epsilon, &opts),
        Command::Channel {
            file,
            channel,
            input_dist,
            m,
            mode,
            samples,
            epsilon,
            delta,
        } => commands::cmd_channel(
            file,
            channel,
            input_dist.as_deref(),
            *m,
            *mode,
            *samples,
            *epsilon,
            *delta,
            &opts,
        ),
        Command::Hyptest {
            file,
            rho,
            sigma,
            epsilon,
        } => commands::cmd_hyptest(file, rho, sigma, *epsilon, &opts),
        Command::Sw {
            file,
            source,
            m,
            epsilon,
            delta,
            mode,
            samples,
        } => commands::cmd_sw(file, source, *m, *epsilon, *delta, *mode, *samples, &opts),
        Command::SecondOrder {
            file,
            rho,
            sigma,
            epsilon,
            n,
        } => commands::cmd_second_order(file, rho, sigma, *epsilon, n, &opts),
        Command::Replay { path } => record::replay(path),
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let started = Instant::now();
    match execute(&cli) {
        Ok(csv) => {
            print!("{csv}");
            if let Some(path) = &cli.record {
                if let Err(e) = record::write_record(path, &argv, &cli, &csv, started.elapsed()) {
                    eprintln!("error: {}", e.message);
                    return ExitCode::from(e.exit_code);
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.exit_code)
        }
    }
}
