//! `procmine` — process mining from the command line.
//!
//! The subcommands follow the usual mining workflow: `stats` and `variants`
//! explore an event log, `discover` mines a Petri net, `evaluate` scores
//! every miner side by side, and `convert` moves artifacts between formats.
//!
//! Exit codes: 0 on success, 1 when an input cannot be read or processed,
//! 2 on usage errors. Reports go to standard output and are byte-stable for
//! identical inputs and flags; progress and warnings go to standard error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use procmine::{Metric, Miner, MinerParams};

mod commands;
mod output;

#[derive(Debug, Parser)]
#[command(
    name = "procmine",
    version,
    about = "Event-log statistics, process discovery and conformance checking"
)]
pub(crate) struct Cli {
    /// Report format for stats, variants and evaluate.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub(crate) format: Format,

    /// Reject XES schema violations instead of recovering with warnings.
    #[arg(long, global = true)]
    pub(crate) strict: bool,

    /// Activity classifier: a classifier name declared in the log, or a
    /// comma-separated list of event attribute keys [default: concept:name].
    #[arg(long, global = true, value_name = "NAME_OR_KEYS")]
    pub(crate) classifier: Option<String>,

    #[command(subcommand)]
    pub(crate) command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub(crate) enum Command {
    /// Summarize a log: counts, start/end activities, frequencies, variants.
    Stats {
        /// Event log, plain or gzip-compressed XES (sniffed by content).
        log: PathBuf,
        /// Cap the number of variants listed in the report.
        #[arg(long, value_name = "N")]
        max_variants: Option<usize>,
    },

    /// List trace variants, most frequent first.
    Variants {
        /// Event log, plain or gzip-compressed XES (sniffed by content).
        log: PathBuf,
        /// Print only the number of distinct variants.
        #[arg(long, conflicts_with = "top")]
        count_only: bool,
        /// Keep only the k most frequent variants (k ≥ 1).
        #[arg(long, value_name = "K", value_parser = clap::value_parser!(u64).range(1..))]
        top: Option<u64>,
        /// Also write the kept traces as XES (gzip when PATH ends in .gz).
        #[arg(long, value_name = "PATH")]
        write: Option<PathBuf>,
    },

    /// Discover a Petri net with one mining algorithm.
    Discover {
        /// Event log, plain or gzip-compressed XES (sniffed by content).
        log: PathBuf,
        /// Mining algorithm.
        #[arg(long, value_enum)]
        miner: MinerArg,
        /// Model output format.
        #[arg(long, value_enum, default_value_t = ModelFormat::Pnml)]
        out: ModelFormat,
        /// Output file (default: standard output).
        #[arg(short, long, value_name = "PATH")]
        output: Option<PathBuf>,
        #[command(flatten)]
        thresholds: ThresholdArgs,
    },

    /// Score miners on one log: fitness, precision, simplicity, generalization.
    Evaluate {
        /// Event log, plain or gzip-compressed XES (sniffed by content).
        log: PathBuf,
        /// Miners to run (comma-separated).
        #[arg(
            long,
            value_enum,
            value_delimiter = ',',
            default_values_t = [MinerArg::Alpha, MinerArg::AlphaPlus, MinerArg::Inductive, MinerArg::Heuristic]
        )]
        miners: Vec<MinerArg>,
        /// Metric columns, in the order given (comma-separated).
        #[arg(
            long,
            value_enum,
            value_delimiter = ',',
            default_values_t = [MetricArg::Fitness, MetricArg::Precision, MetricArg::Simplicity, MetricArg::Generalization]
        )]
        metrics: Vec<MetricArg>,
        /// Add a column with per-miner wall-clock seconds.
        #[arg(long)]
        timings: bool,
        #[command(flatten)]
        thresholds: ThresholdArgs,
    },

    /// Convert between formats, chosen by file extension:
    /// logs .xes/.xes.gz/.json, models .pnml/.dot.
    Convert {
        /// Input file: an event log (XES, plain or gzipped) or a PNML net.
        input: PathBuf,
        /// Output file; its extension selects the target format.
        output: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum MinerArg {
    Alpha,
    AlphaPlus,
    Heuristic,
    Inductive,
}

impl From<MinerArg> for Miner {
    fn from(arg: MinerArg) -> Miner {
        match arg {
            MinerArg::Alpha => Miner::Alpha,
            MinerArg::AlphaPlus => Miner::AlphaPlus,
            MinerArg::Heuristic => Miner::Heuristic,
            MinerArg::Inductive => Miner::Inductive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum MetricArg {
    Fitness,
    Precision,
    Simplicity,
    Generalization,
}

impl From<MetricArg> for Metric {
    fn from(arg: MetricArg) -> Metric {
        match arg {
            MetricArg::Fitness => Metric::Fitness,
            MetricArg::Precision => Metric::Precision,
            MetricArg::Simplicity => Metric::Simplicity,
            MetricArg::Generalization => Metric::Generalization,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum ModelFormat {
    Pnml,
    Dot,
}

/// Heuristic-miner knobs; the other miners ignore them.
#[derive(Debug, Args)]
pub(crate) struct ThresholdArgs {
    /// Minimum dependency measure for keeping an edge.
    #[arg(long, value_name = "X", default_value_t = MinerParams::default().dependency_threshold)]
    pub(crate) dependency_threshold: f64,
    /// Minimum AND-measure for treating two successors as concurrent.
    #[arg(long, value_name = "X", default_value_t = MinerParams::default().and_threshold)]
    pub(crate) and_threshold: f64,
    /// Minimum length-two-loop measure for keeping a loop pair.
    #[arg(long, value_name = "X", default_value_t = MinerParams::default().loop2_threshold)]
    pub(crate) loop2_threshold: f64,
    /// Do not keep each activity's strongest edge when it falls below the
    /// dependency threshold.
    #[arg(long)]
    pub(crate) no_all_connected: bool,
}

impl ThresholdArgs {
    pub(crate) fn to_params(&self) -> MinerParams {
        MinerParams {
            dependency_threshold: self.dependency_threshold,
            and_threshold: self.and_threshold,
            loop2_threshold: self.loop2_threshold,
            all_connected: !self.no_all_connected,
        }
    }
}

/// A command failure, split by exit code.
#[derive(Debug)]
pub(crate) enum Failure {
    /// Unreadable or invalid input, or a processing error — exit 1.
    Input(String),
    /// Bad flag combination or argument value — exit 2.
    Usage(String),
}

impl From<procmine::Error> for Failure {
    fn from(e: procmine::Error) -> Failure {
        Failure::Input(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
