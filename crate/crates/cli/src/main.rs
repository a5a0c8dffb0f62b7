mod args;
mod commands;
mod grid;
mod output;

use std::process::ExitCode;

use affine_cf::Error;
use clap::Parser;

use args::{Cli, Command};
use commands::Failure;

fn run(cli: Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Eval(a) => commands::eval(a)?,
        Command::Compare(a) => commands::compare(a)?,
        Command::Tables(a) => commands::tables(a)?,
        Command::Triangle(a) => commands::triangle(a)?,
    }
    Ok(())
}

fn report(kind: &str, message: &str, path: Option<&str>, code: u8) -> ExitCode {
    eprintln!("{}", output::error_json(kind, message, path));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            return report("usage", e.to_string().trim_end(), None, 2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { error, code }) => {
            let kind = if code == commands::NO_ORACLE_EXIT {
                "no_oracle"
            } else {
                error.kind()
            };
            let path = match &error {
                Error::Model { path, .. } | Error::File { path, .. } => Some(path.as_str()),
                _ => None,
            };
            report(kind, &error.to_string(), path, code as u8)
        }
    }
}
