mod cli;
mod commands;
mod config;
mod error;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{CommandFactory, FromArgMatches};

use cli::{Cli, Command};
use error::{CliError, CliResult};

fn run() -> CliResult<()> {
    let root = Cli::command();
    let argv = config::expand(&root, std::env::args_os().collect())?;
    let matches = match root.try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return Ok(());
        }
        Err(e) => return Err(CliError::usage(e.render().to_string().trim_end().to_string())),
    };
    let cli = Cli::from_arg_matches(&matches).map_err(|e| CliError::usage(e.to_string()))?;
    match &cli.command {
        Command::Augment(a) => commands::augment(a),
        Command::Preview(a) => commands::preview(a),
        Command::Stats(a) => commands::stats(a),
        Command::Bench(a) => commands::bench(a),
        Command::Probe(a) => commands::probe(a),
        Command::Synth(a) => commands::synth(a),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("yona: {e}");
            ExitCode::from(e.code)
        }
    }
}
