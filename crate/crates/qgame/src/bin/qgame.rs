use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qgame::cli::{run, validate_with, Command, EXIT_INVALID};

#[derive(Parser)]
#[command(
    name = "qgame",
    version,
    about = "Nash equilibria in gamed two-qubit computations"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Dominance and pure Nash analysis of a 2x2 ordinal game
    Classical(RunArgs),
    /// Outcome state and theta-distances of a play
    Outcome(RunArgs),
    /// Closed-form Nash certificate for a play
    Verify(RunArgs),
    /// Grid search for Nash plays
    Search(RunArgs),
    /// Coefficients, case inequalities and triangle bounds
    Cases(RunArgs),
    /// Strictly competitive mini-max value of target amplitudes
    Minimax(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML run config
    #[arg(long)]
    config: PathBuf,
    /// Report path (default: stdout, or `output` from the config)
    #[arg(long)]
    output: Option<PathBuf>,
    /// Overrides `seed` from the config
    #[arg(long)]
    seed: Option<u64>,
    /// Zero wall-time fields so the report is byte-reproducible
    #[arg(long)]
    no_timing: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Classical(a) => (Command::Classical, a),
        Cmd::Outcome(a) => (Command::Outcome, a),
        Cmd::Verify(a) => (Command::Verify, a),
        Cmd::Search(a) => (Command::Search, a),
        Cmd::Cases(a) => (Command::Cases, a),
        Cmd::Minimax(a) => (Command::Minimax, a),
    };
    let text = match std::fs::read(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.config.display());
            return ExitCode::from(EXIT_INVALID as u8);
        }
    };
    let mut config = match validate_with(&text, Some(command)) {
        Ok(c) => c,
        Err(diags) => {
            for d in diags {
                eprintln!("error: {}: {d}", args.config.display());
            }
            return ExitCode::from(EXIT_INVALID as u8);
        }
    };
    if args.seed.is_some() {
        config.seed = args.seed;
    }
    if args.output.is_some() {
        config.output = args.output;
    }
    let report = match run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let json = if args.no_timing {
        report.to_canonical_json()
    } else {
        report.to_json()
    };
    match &config.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, json) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_INVALID as u8);
            }
        }
        None => print!("{json}"),
    }
    ExitCode::SUCCESS
}
