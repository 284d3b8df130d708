mod args;
mod modes;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::Args;

const EXIT_VALIDATION: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Core(spectralci::Error),
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "Validation",
            CliError::Core(e) => e.kind(),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numeric() => EXIT_NUMERIC,
            _ => EXIT_VALIDATION,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Validation(m) => m.clone(),
            CliError::Core(e) => e.to_string(),
        }
    }
}

impl From<spectralci::Error> for CliError {
    fn from(e: spectralci::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

fn main() -> ExitCode {
    let result = Args::parse().resolve().and_then(|args| modes::run(&args));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = e.exit_code();
            let line = serde_json::json!({
                "error": e.kind(),
                "exit": code,
                "message": e.message(),
            });
            eprintln!("{line}");
            ExitCode::from(code)
        }
    }
}
