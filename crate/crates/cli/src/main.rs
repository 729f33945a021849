//! `shsr` command-line tool. Exit status: 0 on success, 1 on usage or
//! validation errors, 2 on I/O errors.

mod args;
mod commands;
mod output;

use std::path::Path;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{BaselineCommand, Cli, Command};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn context(path: &Path, e: shsr::Error) -> Self {
        let msg = format!("{}: {e}", path.display());
        if e.is_io() {
            CliError::Io(msg)
        } else {
            CliError::Validation(msg)
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Io(_) => 2,
        }
    }
}

impl From<shsr::Error> for CliError {
    fn from(e: shsr::Error) -> Self {
        if e.is_io() {
            CliError::Io(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::ExtractMeta(a) => commands::extract_meta(a),
        Command::Fit(a) => commands::fit(a),
        Command::Apply(a) => commands::apply(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Baseline(BaselineCommand::Random(a)) => commands::baseline_random(a),
        Command::Baseline(BaselineCommand::Knn(a)) => commands::baseline_knn(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(&cli.log_level)).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
