//! `cubical`: construct, verify, embed, decide and certify hypercube
//! embeddings from the command line.
//!
//! Exit codes: 0 success or witness, 1 I/O or format error, 2 invalid
//! arguments, 3 property refuted, 4 budget exhausted.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "cubical",
    version,
    about = "Hypercube and layer embeddings via edge labellings"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a large-girth cubical graph that fits in no layer.
    Construct {
        /// Spindle length; even, at least 4 (plain) or at least 6 (induced).
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Variant::Plain)]
        variant: Variant,
        /// Graph file to write (edges, labels and the final pair set).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Construction trace to write.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Include every stage's explicit cube embedding in the trace.
        #[arg(long)]
        emit_witness: bool,
    },
    /// Check a labelled graph file for a property.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        property: CheckProperty,
    },
    /// Turn a labelling into explicit cube coordinates.
    Embed {
        #[arg(long = "in")]
        input: PathBuf,
        /// `layered` places the image in two consecutive levels.
        #[arg(long, value_enum, default_value_t = SearchProperty::Cubical)]
        property: SearchProperty,
        /// Vertex mapped to the empty set (cubical) or used as reference.
        #[arg(long, default_value_t = 0)]
        anchor: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the girth of a graph file.
    Girth {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Decide by exact search whether a graph admits a labelling.
    Decide {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        property: SearchProperty,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Write the witness as a labelled graph file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that every layered labelling of a tree puts some pair at
    /// distance at least t + 2.
    Separating {
        /// Tree file with a `pairs` list.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        t: usize,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Certify that a constructed graph admits no layer embedding.
    Certify {
        /// Graph file; with `--trace`. Omit both to build with `--k`.
        #[arg(long = "in", requires = "trace")]
        input: Option<PathBuf>,
        #[arg(long, requires = "input")]
        trace: Option<PathBuf>,
        #[arg(long, conflicts_with = "input")]
        k: Option<usize>,
        #[arg(long, value_enum, default_value_t = Variant::Plain)]
        variant: Variant,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Run the reproduction suite and print a pass/fail table.
    Reproduce {
        #[arg(long, default_value_t = cubical::reproduce::DEFAULT_SEED)]
        seed: u64,
        /// Also run the long direct refutation.
        #[arg(long)]
        include_stretch: bool,
        /// Write the results as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a DOT rendering, with labels and coordinates when available.
    ExportDot {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Plain,
    Induced,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum CheckProperty {
    Cubical,
    Layered,
    Induced,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SearchProperty {
    Cubical,
    Layered,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct BudgetArgs {
    /// Maximum search nodes.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_nodes: Option<u64>,
    /// Maximum wall-clock seconds.
    #[arg(long)]
    pub max_seconds: Option<f64>,
}

/// Outcome classes mapped onto process exit codes.
#[derive(Debug)]
pub enum Failure {
    Input(anyhow::Error),
    Usage(String),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.into())
    }
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_REFUTED: u8 = 3;
pub const EXIT_BUDGET: u8 = 4;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
