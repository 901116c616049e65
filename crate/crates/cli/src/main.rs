//! `pdptw`: generate, solve, validate and benchmark pickup and delivery
//! instances.
//!
//! Exit status: 0 success, 1 I/O or parse error, 2 usage error or limit
//! exceeded, 3 no feasible solution, 4 validation failed.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Generate(a) => commands::generate(a, cli.format),
        Command::Solve(a) => commands::solve(a, cli.format),
        Command::Validate(a) => commands::validate(a, cli.format),
        Command::Oracle(a) => commands::oracle(a, cli.format),
        Command::Bench(a) => commands::bench(a, cli.format),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {:#}", failure.error);
            ExitCode::from(failure.code)
        }
    }
}
