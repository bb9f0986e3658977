use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use wzphase_cli::{execute, Cli, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = execute(&cli).and_then(|text| match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(CliError::from),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(CliError::from),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wzphase: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
