use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use setrisk_cli::{render, run, Cli, CliError};

fn emit(text: &str, output: &str) -> Result<(), CliError> {
    let written = if output == "stdout" {
        std::io::stdout().lock().write_all(text.as_bytes())
    } else {
        std::fs::write(output, text)
    };
    written.map_err(|e| CliError::input(format!("cannot write {output}: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli.command).and_then(|v| emit(&render(&v), &cli.command.common().output));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprint!("{}", e.to_json());
            ExitCode::from(e.code as u8)
        }
    }
}
