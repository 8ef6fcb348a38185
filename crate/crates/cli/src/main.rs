//! `fpss` command line: run a pipeline on a stream file, generate planted
//! instances, and check solutions.
//!
//! Exit codes: 0 for YES (or a valid solution), 1 for NO (or an invalid one),
//! 2 for usage errors and 3 for everything else.

mod generate;
mod report;
mod run;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fpss::stream::Problem;

#[derive(Parser, Debug)]
#[command(name = "fpss", version, about = "Fixed-parameter semi-streaming vertex deletion and cut solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the instance in a stream file.
    Run(run::RunArgs),
    /// Write a planted YES instance as a stream file.
    Gen(generate::GenArgs),
    /// Check a solution against the materialized stream.
    Verify(verify::VerifyArgs),
}

/// Where and how to write the `key=value` report.
#[derive(Args, Debug, Clone, Default)]
pub struct ReportArgs {
    /// Also write the report to this file.
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
    /// Emit the report as a JSON object instead of `key=value` lines.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot access {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Stream(#[from] fpss::stream::StreamError),
    #[error(transparent)]
    Engine(#[from] fpss::hitting::EngineError),
    #[error(transparent)]
    Hereditary(#[from] fpss::hereditary::HereditaryError),
    #[error(transparent)]
    Block(#[from] fpss::block::BlockError),
    #[error(transparent)]
    Cut(#[from] fpss::cut::CutError),
    #[error("emitted solution {0:?} failed verification on the input")]
    BadSolution(Vec<usize>),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 3,
        }
    }
}

pub fn parse_problem(s: &str) -> Result<Problem, String> {
    s.parse()
}

pub fn read_file(path: &std::path::Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(a) => run::run(&a),
        Command::Gen(a) => generate::gen(&a).map(|()| true),
        Command::Verify(a) => verify::verify(&a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
