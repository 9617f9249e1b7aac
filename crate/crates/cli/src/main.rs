use std::process::ExitCode;

use clap::Parser;
use probscore_cli::args::Cli;

fn main() -> ExitCode {
    match probscore_cli::run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
