//! Argument definitions and command implementations behind the `flowmatch`
//! binary. Commands take an output sink for their console text so they can
//! run in-process.

pub mod commands;
pub mod formats;

use std::io;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use flowmatch::bench::{BenchError, Engine};
use flowmatch::workload::WorkloadError;
use flowmatch::{CandidateMode, ClassifyError, MatchError};
use thiserror::Error;

pub use commands::run;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}:{line}: {msg}")]
    Input {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error(transparent)]
    Workload(#[from] WorkloadError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Match(#[from] MatchError),
    #[error(transparent)]
    Bench(#[from] BenchError),
}

impl CliError {
    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub(crate) fn input(path: &str, line: usize, msg: String) -> Self {
        CliError::Input {
            path: path.to_string(),
            line,
            msg,
        }
    }

    /// 2 for usage errors, as clap uses for bad flags; 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "flowmatch",
    version,
    about = "Flow table lookup with a layered pre-match index"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a seeded flow table.
    GenTable(GenTableArgs),
    /// Generate a seeded packet trace against a table.
    GenPackets(GenPacketsArgs),
    /// Report signature classes and layer statistics.
    Classify(ClassifyArgs),
    /// Look up every packet of a trace and update counters.
    Match(MatchArgs),
    /// Time the engines and write a CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("signatures").required(true).args(["profile", "uniform"]))]
pub struct GenTableArgs {
    #[arg(long)]
    pub entries: usize,
    /// File of `c1-c2-c3-c4:count` lines.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Draw signatures uniformly over all classes except all-wildcard.
    #[arg(long)]
    pub uniform: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenPacketsArgs {
    #[arg(long)]
    pub table: PathBuf,
    #[arg(long)]
    pub count: usize,
    /// Target share of matching packets, in percent.
    #[arg(long)]
    pub hit_rate: f64,
    #[arg(long)]
    pub tuple_length: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub table: PathBuf,
    #[arg(long)]
    pub packets: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Linear,
    TupleSpace,
    Fopenflow,
}

#[derive(Debug, Args)]
pub struct MatchArgs {
    #[arg(long)]
    pub table: PathBuf,
    #[arg(long)]
    pub packets: PathBuf,
    #[arg(long, value_enum)]
    pub engine: EngineArg,
    /// Candidate classes for fopenflow; ignored by the other engines.
    #[arg(long, default_value_t = CandidateMode::Dominant)]
    pub mode: CandidateMode,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioArg {
    HitRate,
    TupleLength,
    Stability,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub scenario: ScenarioArg,
    #[arg(long, default_value_t = 10_000)]
    pub entries: usize,
    /// Packets per generated trace.
    #[arg(long, default_value_t = 100_000)]
    pub trace: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Comma-separated subset of linear, tuple-space, fopenflow-strict,
    /// fopenflow-dominant.
    #[arg(long, value_delimiter = ',', default_values_t = Engine::ALL.to_vec())]
    pub engines: Vec<Engine>,
    #[arg(long)]
    pub out: PathBuf,
    /// Fixed tuple length (hit-rate and stability scenarios).
    #[arg(long)]
    pub tuple_length: Option<usize>,
    /// Fixed hit rate in percent (tuple-length and stability scenarios).
    #[arg(long)]
    pub hit_rate: Option<f64>,
    /// Repetitions (stability scenario).
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long, default_value_t = 3)]
    pub warmup: usize,
    /// Measured passes per timing.
    #[arg(long, default_value_t = 10)]
    pub iters: usize,
}
