use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use wittbox::count::{CountOptions, DEFAULT_POINT_CAP};
use wittbox::witt::DEFAULT_TERM_BUDGET;
use wittbox::{Error, ErrorClass};

mod commands;
mod golden;

/// Point counting over finite Witt rings restricted to combinatorial boxes.
#[derive(Debug, Parser)]
#[command(name = "wittbox", version)]
struct Cli {
    /// Largest q^n that may be enumerated or interpolated.
    #[arg(long, global = true, default_value_t = DEFAULT_POINT_CAP)]
    cap: u64,
    /// Term budget for structure polynomials.
    #[arg(long, global = true, default_value_t = DEFAULT_TERM_BUDGET)]
    budget: usize,
    /// Worker threads for enumeration (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Seed for randomized suites; echoed in every report.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Include wall-clock timings (reports are then not reproducible byte for byte).
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    /// One JSON object per line.
    Records,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print Witt structure polynomials.
    WittPolys {
        #[arg(long)]
        p: u64,
        /// Number of summands.
        #[arg(long, default_value_t = 2)]
        r: usize,
        #[arg(long)]
        nmax: usize,
        /// Binary product polynomials M_n instead of sums.
        #[arg(long, conflicts_with = "substituted")]
        mul: bool,
        /// s_n: the sums with x_ij replaced by x_ij^(p^i).
        #[arg(long)]
        substituted: bool,
    },
    /// Count solutions of an instance file and check the divisibility bound.
    Count {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Print the equivalent polynomial system over F_q.
    Reduce { file: PathBuf },
    /// Interpolate the representing polynomials of an instance's box.
    BoxInterp { file: PathBuf },
    /// Recompute the published examples and compare with their values.
    ReproPaper,
    /// Verify seeded random instances.
    PropSuite {
        #[arg(long, default_value_t = 200)]
        count: u64,
        /// Only fields with q at most this.
        #[arg(long, default_value_t = 9)]
        max_q: u64,
    },
}

pub struct Config {
    pub opts: CountOptions,
    pub seed: u64,
    pub format: Format,
    pub timings: bool,
}

/// Why a command stopped.
pub enum Failure {
    /// A check ran and did not pass (exit 1).
    Check,
    Error(Error),
    Usage(String),
    /// Already reported; exit with this code.
    Exit(u8),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

pub fn exit_code(class: ErrorClass) -> u8 {
    match class {
        ErrorClass::Input => 2,
        ErrorClass::Invariant => 3,
        ErrorClass::Refutation => 4,
        ErrorClass::Budget => 5,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = Config {
        opts: CountOptions {
            cap: cli.cap,
            budget: cli.budget,
            workers: cli.workers,
        },
        seed: cli.seed,
        format: cli.format,
        timings: cli.timings,
    };
    let outcome = if cli.cap == 0 || cli.budget == 0 {
        Err(Failure::Usage("--cap and --budget must be positive".into()))
    } else {
        match cli.command {
            Command::WittPolys {
                p,
                r,
                nmax,
                mul,
                substituted,
            } => commands::witt_polys(&cfg, p, r, nmax, mul, substituted),
            Command::Count { files } => commands::count(&cfg, &files),
            Command::Reduce { file } => commands::reduce(&cfg, &file),
            Command::BoxInterp { file } => commands::box_interp(&cfg, &file),
            Command::ReproPaper => golden::repro_paper(&cfg),
            Command::PropSuite { count, max_q } => commands::prop_suite(&cfg, count, max_q),
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Exit(code)) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(e.class()))
        }
    }
}
