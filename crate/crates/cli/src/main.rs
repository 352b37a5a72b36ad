//! `percussim`: run, replay and serve robot percussion performances.
//!
//! Exit codes: 0 ok, 1 other failure, 2 usage, 3 unreadable or unwritable
//! file, 4 invalid input, 5 replay mismatch, 6 port in use.

use clap::{Parser, Subcommand};

mod common;
mod error;
mod replay;
mod run;
mod serve;
mod validate;

use error::exit;

#[derive(Debug, Parser)]
#[command(
    name = "percussim",
    version,
    about = "Deterministic robot percussion quartet simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a performance offline and write its log and renderings.
    Run(run::RunArgs),
    /// Re-render a recorded log, optionally checking it by re-simulation.
    Replay(replay::ReplayArgs),
    /// Run a live performance and serve the websocket control bridge.
    Serve(serve::ServeArgs),
    /// Check pattern library files.
    Validate(validate::ValidateArgs),
}

fn main() {
    let cli = Cli::try_parse().unwrap_or_else(|e| {
        let code = if e.use_stderr() {
            exit::USAGE
        } else {
            exit::OK
        };
        e.print().ok();
        std::process::exit(code);
    });
    let result = match &cli.command {
        Command::Run(a) => run::execute(a),
        Command::Replay(a) => replay::execute(a),
        Command::Serve(a) => serve::execute(a),
        Command::Validate(a) => validate::execute(a),
    };
    if let Err(e) = result {
        if !matches!(e, error::CliError::Reported(_)) {
            eprintln!("percussim: {e}");
        }
        std::process::exit(e.code());
    }
}
