//! `rnc`: compile cascades into recurrent neural cascades, run them, check
//! them, and replay the worked constructions.
//!
//! Exit codes: 0 pass, 1 I/O or invalid input, 2 invalid parameters,
//! 3 ungroundable input, 4 check failure.

mod check;
mod commands;
mod demo;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rnc_core::Error;

#[derive(Parser)]
#[command(name = "rnc", version, about = "Recurrent neural cascades from cascades of prime semiautomata")]
struct Cli {
    /// Worker threads for the checkers (results do not depend on it)
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    threads: Option<u32>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a cascade or network JSON into an RNC JSON
    Compile {
        cascade: PathBuf,
        #[command(flatten)]
        neuron: NeuronArgs,
        /// Write the RNC here instead of stdout
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Run an RNC on letters or real inputs
    Run {
        rnc: PathBuf,
        /// Letters or reals separated by spaces or commas; a run of
        /// one-character letters may be written without separators
        input: Option<String>,
        /// Read the input from a file instead
        #[arg(long, conflicts_with = "input")]
        file: Option<PathBuf>,
        /// Print one JSON line per step instead of the output letters
        #[arg(long)]
        trace: bool,
    },
    /// Check a property; prints a JSON report, exits 4 on failure
    Check {
        subject: Subject,
        /// aperiodic: automaton, semiautomaton or cascade;
        /// neuron: neuron;
        /// homomorphism: rnc and cascade;
        /// equivalence: rnc and automaton or cascade
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        config: RunConfig,
    },
    /// Build, compile and cross-check one of the worked constructions
    Demo {
        name: DemoName,
        #[command(flatten)]
        neuron: NeuronArgs,
        #[command(flatten)]
        config: RunConfig,
        /// Price width for ttop
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..=16))]
        bits: u32,
        /// Number of cookie episodes
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        episodes: Option<u64>,
        /// Read fixtures (prices_*.json, cookie_episode_*.jsonl) from this directory
        #[arg(long)]
        fixtures: Option<PathBuf>,
        /// Write the generated fixtures to this directory
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Subject {
    Aperiodic,
    Neuron,
    Homomorphism,
    Equivalence,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DemoName {
    Ttop,
    Cookie,
    Parity,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ActivationArg {
    Sign,
    Tanh,
}

#[derive(Args, Clone, Copy)]
struct NeuronArgs {
    #[arg(long, value_enum, default_value_t = ActivationArg::Tanh)]
    activation: ActivationArg,
    /// Self-loop weight w; toggles need w < 0 (tanh: w < -1)
    #[arg(long, allow_hyphen_values = true)]
    weight: Option<f64>,
    /// Lower threshold a (default: optimal for tanh, 0.5 for sign)
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    /// Upper threshold b, tanh only (default: optimal)
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
}

/// Checker settings; unset values take per-command defaults.
#[derive(Args, Clone, Copy)]
struct RunConfig {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Words, samples or sequences to try
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    trials: Option<u64>,
    /// Longest random word (episode length for cookie)
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    max_len: Option<u64>,
    /// Grid points per axis for neuron checks
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..=10_000))]
    grid: u64,
}

/// Result of a command that checks something.
enum Verdict {
    Pass,
    Fail,
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::InvalidParameters(_)) => 2,
        Some(Error::Ungroundable { .. } | Error::UnknownLetter { .. }) => 3,
        _ => 1,
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<Verdict> {
    match cli.command {
        Command::Compile { cascade, neuron, output } => commands::compile(&cascade, neuron, output.as_deref()),
        Command::Run { rnc, input, file, trace } => commands::run(&rnc, input.as_deref(), file.as_deref(), trace),
        Command::Check { subject, files, config } => check::check(subject, &files, config),
        Command::Demo { name, neuron, config, bits, episodes, fixtures, output } => {
            let opts = demo::DemoOptions {
                neuron,
                config,
                bits: bits as usize,
                episodes,
                fixtures,
                output,
            };
            demo::demo(name, &opts)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let start = Instant::now();
    let result = dispatch(cli);
    eprintln!("elapsed {:.3} s", start.elapsed().as_secs_f64());
    match result {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Fail) => ExitCode::from(4),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
