mod args;
mod commands;
mod error;
mod input;
mod manifest;

use clap::Parser;

use args::{Cli, Command};

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Select(a) => commands::select(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Diagnose(a) => commands::diagnose(a),
        Command::Sample(a) => commands::sample(a),
    };
    if let Err(e) = result {
        eprintln!("kernsel: {e}");
        std::process::exit(e.exit_code());
    }
}
