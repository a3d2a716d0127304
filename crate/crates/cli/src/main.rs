mod args;
mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Phase1d(a) => commands::phase1d(a),
        Command::Potential(a) => commands::potential(a),
        Command::Stability(a) => commands::stability(a),
        Command::Minimize2d(a) => commands::minimize2d(a),
        Command::Cascade(a) => commands::cascade(a),
        Command::GammaLimit(a) => commands::gamma_limit(a),
        Command::Energy(a) => commands::energy(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
