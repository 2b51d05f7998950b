use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    foilwise_cli::main_with(foilwise_cli::Cli::parse())
}
