use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spanq::experiment::{self, ExperimentConfig, Task};

#[derive(Parser)]
#[command(name = "spanq", version, about = "Span program and state conversion experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Witness kind and size for each input
    Witness(RunArgs),
    /// Run the function evaluation algorithm
    Evaluate(RunArgs),
    /// Run the state conversion algorithm
    Convert(RunArgs),
    /// Evaluate and convert over every configured input
    Sweep(RunArgs),
    /// Check the early-phase and conversion inequalities exactly
    LemmaCheck(RunArgs),
    /// Compare each program against its negation
    Negate(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON config file
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (task, args) = match cli.command {
        Command::Witness(a) => (Task::Witness, a),
        Command::Evaluate(a) => (Task::Evaluate, a),
        Command::Convert(a) => (Task::Convert, a),
        Command::Sweep(a) => (Task::Sweep, a),
        Command::LemmaCheck(a) => (Task::LemmaCheck, a),
        Command::Negate(a) => (Task::Negate, a),
    };
    match run(task, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(task: Task, args: RunArgs) -> Result<(), String> {
    let path = &args.config;
    let mut cfg =
        ExperimentConfig::from_file(path).map_err(|e| format!("{}: {e}", path.display()))?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if let Some(out) = args.out {
        cfg.out = out;
    }
    cfg.validate().map_err(|e| e.to_string())?;
    let out = experiment::run(task, &cfg).map_err(|e| e.to_string())?;
    println!("{}", out.csv_path.display());
    println!("{}", out.summary_path.display());
    Ok(())
}
