//! Command-line pipeline: generate instances, label them with exact
//! oracles, train a classifier, solve with the adaptive sampler, evaluate
//! runs and run column generation for graph colouring.

pub mod commands;
pub mod config;
pub mod dataset;
pub mod error;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "asp", version, about = "Adaptive solution prediction toolkit")]
pub struct Cli {
    #[command(flatten)]
    pub shared: Shared,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags accepted by every subcommand. Values given here override the
/// config file.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Shared {
    /// Master seed
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON config file; flags override its entries
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker thread count
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate random instances
    Gen(commands::gen::GenArgs),
    /// Solve instances exactly and write labels
    Label(commands::label::LabelArgs),
    /// Train a classifier on a labeled dataset
    Train(commands::train::TrainArgs),
    /// Run the adaptive sampler on instances
    Solve(commands::solve::SolveArgs),
    /// Summarise solve runs
    Eval(commands::eval::EvalArgs),
    /// Column generation for the colouring LP relaxation
    Cg(commands::cg::CgArgs),
}

fn init_threads(threads: Option<usize>) {
    if let Some(t) = threads {
        // a second initialisation (e.g. in tests) keeps the existing pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global();
    }
}

pub fn run(cli: Cli) -> CliResult<()> {
    init_threads(cli.shared.threads);
    match &cli.command {
        Command::Gen(a) => commands::gen::run(&cli.shared, a),
        Command::Label(a) => commands::label::run(&cli.shared, a),
        Command::Train(a) => commands::train::run(&cli.shared, a),
        Command::Solve(a) => commands::solve::run(&cli.shared, a),
        Command::Eval(a) => commands::eval::run(&cli.shared, a),
        Command::Cg(a) => commands::cg::run(&cli.shared, a),
    }
}
