use clap::Parser;
use pareto_records_cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
