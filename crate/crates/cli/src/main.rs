//! `gluing`: coordinate conversion, smoothness classification, plumbing,
//! chart transitions and decay verification.

mod classify;
mod config;
mod convert;
mod coords;
mod error;
mod output;
mod plumb;
mod transition;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "gluing",
    version,
    about = "Gluing-parameter coordinates on moduli of stable disks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    Convert(convert::ConvertArgs),
    Classify(classify::ClassifyArgs),
    Plumb(plumb::PlumbArgs),
    Transition(transition::TransitionArgs),
    VerifyDecay(verify::VerifyArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Convert(a) => convert::run(a),
        Command::Classify(a) => classify::run(a),
        Command::Plumb(a) => plumb::run(a),
        Command::Transition(a) => transition::run(a),
        Command::VerifyDecay(a) => verify::run(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}
