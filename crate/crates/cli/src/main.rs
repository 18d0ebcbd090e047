//! `stresslab`: fixture generation and exact verification reports for stress algebras.

mod commands;
mod files;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use stresslab::numeric::DEFAULT_PRIME_BOUND;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot access {0}: {1}")]
    Io(String, std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("{0}")]
    Library(String),
}

#[derive(Debug, Parser)]
#[command(name = "stresslab", version, about = "Exact stress spaces, stress algebras and their verification reports")]
pub struct Cli {
    #[command(flatten)]
    pub opts: Options,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Coordinates and weights are drawn from [-bound, bound].
    #[arg(long, global = true, default_value_t = 20)]
    pub bound: u64,
    /// Random trials per check (default depends on the command).
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    #[arg(long, global = true, default_value_t = 10)]
    pub max_retries: usize,
    /// Trial-division bound for squarefree kernels.
    #[arg(long, global = true, default_value_t = DEFAULT_PRIME_BOUND)]
    pub prime_bound: u64,
    /// Use 60-digit floats where a square root cannot be split exactly.
    #[arg(long, global = true)]
    pub float_fallback: bool,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Sample this many (d+1)-subsets for general position when n > 16.
    #[arg(long, global = true)]
    pub gp_samples: Option<usize>,
    /// Record per-phase timings (makes reports non-reproducible).
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GenKind {
    Simplex,
    Crosspoly,
    Cyclic,
    Cone,
    Join,
    Suspension,
    Barycentric,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FieldArg {
    Q,
    Gf2,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a fixture complex: simplex D | crosspoly D | cyclic D N | cone F | suspension F | barycentric F | join F G.
    Gen {
        kind: GenKind,
        params: Vec<String>,
        /// Label of the cone point.
        #[arg(long, default_value = "apex")]
        apex: String,
    },
    /// Pseudomanifold, manifold, sphere, orientability and Dehn–Sommerville gates.
    Verify {
        complex: PathBuf,
        #[arg(long, value_enum, default_value = "q")]
        field: FieldArg,
    },
    /// Graded stress space against the h-vector, with the Q-genericity report.
    Stress {
        complex: PathBuf,
        #[arg(long)]
        realization: Option<PathBuf>,
    },
    /// Full g-vector pipeline on a homology sphere.
    Gconj { complex: PathBuf },
    /// Weak Lefschetz test with random degree-one ω.
    Wlp {
        complex: PathBuf,
        #[arg(long)]
        realization: Option<PathBuf>,
    },
    /// Socle, unit action and degree-one generation of the stress algebra.
    Gorenstein {
        complex: PathBuf,
        #[arg(long)]
        realization: Option<PathBuf>,
    },
    /// Stress–lifting–reciprocal round trips, product formula and the A/B matrices.
    Maxwell {
        complex: PathBuf,
        #[arg(long)]
        realization: Option<PathBuf>,
    },
    /// Pivotal order of the k-th rigidity matrix, optionally pivot-compatible with an autonomous set.
    Pivot {
        complex: PathBuf,
        #[arg(long)]
        realization: Option<PathBuf>,
        /// Face dimension; defaults to the complex dimension.
        #[arg(long)]
        k: Option<isize>,
        /// Comma-separated vertex labels.
        #[arg(long, value_delimiter = ',')]
        autonomous: Vec<String>,
    },
    /// Skeletal chain complexes, cone projection, φ and the ξ/M rank conditions on the cone.
    Skeletal {
        complex: PathBuf,
        /// Restrict the per-degree checks to this r.
        #[arg(long)]
        r: Option<usize>,
    },
}

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("STRESSLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::InvalidParameters(format!("STRESSLAB_THREADS={raw} is not a thread count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::InvalidParameters(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = init_threads().and_then(|()| commands::run(&cli));
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
