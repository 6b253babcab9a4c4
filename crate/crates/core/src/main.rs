use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use profner::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).with_context(|| "profner failed") {
        Ok(outcome) => {
            if !outcome.report.is_empty() {
                print!("{}", outcome.report);
            }
            println!("{}", outcome.result_line());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::FAILURE
        }
    }
}
