use clap::Parser;
use phasefront::cli::{execute, Cli};

fn main() {
    std::process::exit(execute(&Cli::parse()));
}
