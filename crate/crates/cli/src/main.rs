mod commands;
mod input;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Entanglement-assisted and Holevo capacities of quantum channels, and
/// numerical certification of C_E ≤ f(d_A)·C_H.
#[derive(Parser, Debug)]
#[command(name = "eacap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// C_E and C_H of one channel, in bits.
    Capacity {
        /// Channel JSON file; omit when --named is given.
        channel: Option<PathBuf>,
        #[command(flatten)]
        source: NamedArg,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Check C_E ≤ f(d_in)·C_H on random channels.
    VerifyTheorem {
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long = "din", default_value_t = 2)]
        d_in: usize,
        #[arg(long = "dout", default_value_t = 2)]
        d_out: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Check g(k)·K_τ(ρ−τ) ≤ D(ρ‖τ) ≤ K_τ(ρ−τ) on random pairs.
    VerifyProposition {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Single dimension; defaults to every d in 2..=5.
        #[arg(long = "din")]
        d: Option<usize>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Replay every link of the proof chain for one channel and pure input.
    Chain {
        channel: Option<PathBuf>,
        #[command(flatten)]
        source: NamedArg,
        /// `max-entangled`, `random:SEED`, or a JSON vector of [re, im] pairs
        /// (a JSON matrix of rows is accepted and must be pure).
        #[arg(long, default_value = "max-entangled")]
        state: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Qubit depolarizing sweep: C_E, C_H and their ratio.
    Figure1 {
        /// Equispaced points on [0, 4/3]; the probe p = 0.999 is always added.
        #[arg(long, default_value_t = 81)]
        points: usize,
        /// Also write an SVG plot to this path.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Write a channel as JSON.
    Channel {
        #[command(flatten)]
        source: NamedArg,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Args, Debug)]
struct NamedArg {
    /// Built-in channel instead of a file:
    /// `identity:d=2`, `depolarizing:d=2,p=0.5` (0 ≤ p ≤ d²/(d²−1)),
    /// `replacement:din=2,dout=2` (fully mixed output) or
    /// `random:din=2,dout=2,kraus=4,seed=1` (kraus defaults to din·dout).
    #[arg(long)]
    named: Option<String>,
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Solver tolerance on the optimality gap, nats.
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    #[arg(long = "max-iter", default_value_t = 5000)]
    max_iter: usize,
    /// Random starts per inner maximization.
    #[arg(long, default_value_t = 32)]
    restarts: usize,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(status) => ExitCode::from(status.code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::Status::InputError.code())
        }
    }
}
