use std::io::Write;
use std::num::NonZeroUsize;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use picturedef::{MBigRule, Rational};

mod commands;
mod error;
mod reproduce;

use error::CliError;

/// Invariants, resolution graphs, picture-deformation incidence matrices and
/// Milnor-fiber data of decorated plane-curve germs.
#[derive(Debug, Parser)]
#[command(name = "picturedef", version)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Rule for the embedded total multiplicity M(i).
    #[arg(long, global = true, default_value = "paper-calibrated")]
    pub m_big_rule: MBigRule,

    /// Worker threads (default: all available cores).
    #[arg(long, global = true)]
    pub jobs: Option<NonZeroUsize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate and inspect germ files.
    #[command(subcommand)]
    Germ(GermCommand),
    /// Print the exceptional dual graph of a germ.
    Resolve {
        germ: PathBuf,
        /// Only the sandwiched graph E(C,l).
        #[arg(long)]
        ecl: bool,
    },
    /// Operations on weighted trees.
    #[command(subcommand)]
    Graph(GraphCommand),
    /// All incidence matrices allowed by the constraint equations.
    Enumerate {
        #[arg(long)]
        germ: PathBuf,
    },
    /// Incidence matrices realized by translating lines of given slopes.
    Realizable {
        /// Germ of concurrent lines (default: r lines through a point, l = r-1).
        #[arg(long)]
        germ: Option<PathBuf>,
        #[arg(long, required = true, value_delimiter = ',', allow_hyphen_values = true)]
        slopes: Vec<Rational>,
        #[arg(long, default_value_t = 4)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Test only the matrices in this file and print a verdict for each.
        #[arg(long)]
        matrices: Option<PathBuf>,
    },
    /// Milnor-fiber data derived from incidence matrices.
    #[command(subcommand)]
    Fillings(FillingsCommand),
    /// Rerun a bundled example and check it against its golden output.
    Reproduce {
        example: reproduce::Example,
        #[arg(long, default_value_t = reproduce::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        samples: usize,
        /// Print the output without comparing it to the golden file.
        #[arg(long)]
        no_check: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum GermCommand {
    /// Validate a germ and print its canonical serialization.
    Check { germ: PathBuf },
    /// delta, m, M, intersection numbers and standardness.
    Invariants { germ: PathBuf },
    /// Topological equivalence of two germs.
    Equivalent { first: PathBuf, second: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum GraphCommand {
    /// Blow down -1 vertices of valence at most 2 until none is left.
    Blowdown {
        graph: PathBuf,
        /// Blow down only this vertex and print the resulting graph.
        #[arg(long)]
        vertex: Option<String>,
    },
    /// Negative definiteness of the intersection form.
    Definite { graph: PathBuf },
    /// Search for -1 leaves that make the graph blow down to nothing.
    Recognize {
        graph: PathBuf,
        /// Maximum number of added leaves per vertex (default: |weight|).
        #[arg(long)]
        max_extra: Option<u32>,
    },
}

#[derive(Debug, Subcommand)]
pub enum FillingsCommand {
    /// Gram matrix, cap framings, Euler number and kernel lattice per matrix.
    Report {
        #[arg(long)]
        germ: PathBuf,
        #[arg(long)]
        matrices: PathBuf,
    },
    /// Decide whether two matrices give distinct fillings.
    Distinguish {
        #[arg(long)]
        germ: PathBuf,
        first: PathBuf,
        second: PathBuf,
    },
    /// Lower bound on the number of fillings over equivalent germs.
    Count {
        #[arg(long, required = true, num_args = 1..)]
        germs: Vec<PathBuf>,
        /// One matrix file per germ (default: every constraint-satisfying matrix).
        #[arg(long, num_args = 1..)]
        matrices: Vec<PathBuf>,
    },
}

pub fn run(config: &RunConfig) -> Result<String, CliError> {
    let threads = config
        .jobs
        .map(NonZeroUsize::get)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, NonZeroUsize::get));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool");
    pool.install(|| commands::dispatch(config))
}

fn main() -> ExitCode {
    let config = RunConfig::parse();
    match run(&config) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            // A closed pipe is not worth a panic.
            let _ = stdout.write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
