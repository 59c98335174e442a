//! `driftbench`: generate constraint-conversation corpora, run agents over
//! them, analyze the resulting traces, and replay the golden transcripts.
//!
//! Exit codes: 0 success, 1 run/analysis/fixture failure, 2 usage error.

mod analyze;
mod config;
mod fixtures_cmd;
mod generate;
mod run;

use clap::{Parser, Subcommand};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "driftbench", version, about = "Multi-turn constraint benchmark driver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a problem corpus as JSONL.
    Generate(generate::GenerateArgs),
    /// Evaluate an agent over a corpus and write a trace file.
    Run(run::RunArgs),
    /// Summarize one or more trace files into report tables.
    Analyze(analyze::AnalyzeArgs),
    /// Replay the scripted golden transcripts and check their marks.
    Fixtures,
}

/// Failure classes map onto exit codes: `Usage` → 2, `Run` → 1.
#[derive(Debug)]
pub(crate) enum Failure {
    Usage(String),
    Run(String),
}

pub(crate) type CmdResult = Result<(), Failure>;

pub(crate) fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

pub(crate) fn runtime(err: impl std::fmt::Display) -> Failure {
    Failure::Run(err.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => generate::run(args),
        Command::Run(args) => run::run(args),
        Command::Analyze(args) => analyze::run(args),
        Command::Fixtures => fixtures_cmd::run(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
