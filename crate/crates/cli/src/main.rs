mod error;
mod output;
mod sample;
mod search;
mod table;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use error::CliError;

/// Width-dimension bounds and explicit embeddings of l^p unit balls.
#[derive(Debug, Parser)]
#[command(name = "widthlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bound intervals for wdim over an eps grid.
    Table(table::TableArgs),
    /// Run invariant suites and report each checked claim.
    Verify(verify::VerifyArgs),
    /// Search for small-diameter spanning configurations.
    Search(search::SearchArgs),
    /// Apply an explicit embedding to given or random points.
    Embed(sample::EmbedArgs),
    /// Sample a fiber of an explicit embedding.
    Fibers(sample::FiberArgs),
    /// Export a Hadamard matrix or its point set.
    Hadamard(sample::HadamardArgs),
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("WIDTHLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::usage(format!("WIDTHLAB_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(CliError::internal)
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Table(args) => table::run(&args),
        Command::Verify(args) => verify::run(&args),
        Command::Search(args) => search::run(&args),
        Command::Embed(args) => sample::embed(&args),
        Command::Fibers(args) => sample::fibers(&args),
        Command::Hadamard(args) => sample::hadamard(&args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
