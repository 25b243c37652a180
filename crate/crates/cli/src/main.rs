#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::CliError;

/// Feature-space Bayesian comparison of random network models.
#[derive(Debug, Parser)]
#[command(name = "netcompare", version, about)]
struct Cli {
    /// Worker threads for simulation (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Flags shared by the simulation commands.
#[derive(Debug, Clone, Args)]
pub struct SimArgs {
    /// Prior-predictive samples per model [default: 100].
    #[arg(long)]
    pub samples: Option<usize>,
    /// Master seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Replace a parameter prior by a uniform grid, e.g. `alpha:2.9,3.0,3.1`.
    #[arg(long)]
    pub grid: Option<String>,
    /// JSON file with defaults for any of these flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Output flags.
#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample graphs from a model's prior predictive into edge-list files.
    Generate {
        #[arg(long)]
        model: Option<PathBuf>,
        #[command(flatten)]
        sim: SimArgs,
        /// Output directory for the edge lists and manifest.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extract features from one edge-list file.
    Features {
        #[arg(long)]
        data: Option<PathBuf>,
        /// Comma-separated feature tokens; all features when omitted.
        #[arg(long)]
        features: Option<String>,
        #[command(flatten)]
        output: OutArgs,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Compare two models against observed data.
    Compare {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        model2: Option<PathBuf>,
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        features: Option<String>,
        /// quadratic, absolute, zero_one or zero_one:<tolerance>.
        #[arg(long)]
        loss: Option<String>,
        /// Prior probabilities of the two models, e.g. `0.5,0.5`.
        #[arg(long)]
        priors: Option<String>,
        /// Directory for density and histogram CSVs.
        #[arg(long)]
        plot_dir: Option<PathBuf>,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        output: OutArgs,
    },
    /// Prior-predictive probability of feature ranges under one or two models.
    Elicit {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        model2: Option<PathBuf>,
        /// `feature:lo:hi`; repeatable.
        #[arg(long = "range")]
        ranges: Vec<String>,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        output: OutArgs,
    },
    /// Run a replicated simulation study and emit the results table.
    Simulate {
        /// Node count of the built-in study design [default: 200].
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long)]
        replications: Option<usize>,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        output: OutArgs,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate { model, sim, out } => commands::generate(model, &sim, out),
        Command::Features {
            data,
            features,
            output,
            config,
        } => commands::features(data, features, &output, config),
        Command::Compare {
            model,
            model2,
            data,
            features,
            loss,
            priors,
            plot_dir,
            sim,
            output,
        } => commands::compare(
            commands::CompareArgs {
                model,
                model2,
                data,
                features,
                loss,
                priors,
                plot_dir,
            },
            &sim,
            &output,
        ),
        Command::Elicit {
            model,
            model2,
            ranges,
            sim,
            output,
        } => commands::elicit(model, model2, ranges, &sim, &output),
        Command::Simulate {
            nodes,
            replications,
            sim,
            output,
        } => commands::simulate(nodes, replications, &sim, &output),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        builder = builder.num_threads(t);
    }
    let pool = match builder.build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start thread pool: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
