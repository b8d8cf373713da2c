use clap::Parser;
use diagcount::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
