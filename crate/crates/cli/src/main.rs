use std::process::ExitCode;

use clap::Parser;
use grassmann_cli::{execute, Cli};

fn main() -> ExitCode {
    ExitCode::from(execute(&Cli::parse()))
}
