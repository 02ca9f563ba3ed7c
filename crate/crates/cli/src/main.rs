mod args;
mod commands;
mod error;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use crate::args::Cli;
use crate::commands::Output;
use crate::error::CliError;

fn emit(path: Option<&Path>, out: Output) -> Result<(), CliError> {
    match path {
        Some(path) => {
            std::fs::write(path, &out.body).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            if let Some(s) = &out.summary {
                println!("{s}");
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            let newline = if out.body.ends_with('\n') { "" } else { "\n" };
            match write!(stdout, "{}{newline}", out.body) {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                r => r.map_err(|e| CliError::Io(format!("stdout: {e}")))?,
            }
            if let Some(s) = &out.summary {
                eprintln!("{s}");
            }
        }
    }
    out.failure.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
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
    match commands::run(cli.command).and_then(|out| emit(cli.out.as_deref(), out)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
