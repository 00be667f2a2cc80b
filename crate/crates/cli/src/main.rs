use std::process::ExitCode;

use clap::Parser;
use kanto_cli::{configure_threads, emit, execute, Cli, CliError};

fn run(cli: &Cli) -> Result<(), CliError> {
    configure_threads()?;
    let (text, out) = execute(cli)?;
    emit(&text, out.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kanto: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
