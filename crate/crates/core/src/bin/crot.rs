//! `crot`: command-line access to the solvers.

use clap::Parser;
use complex_rotation::cli::{run, Cli};

fn main() {
    std::process::exit(run(&Cli::parse()));
}
