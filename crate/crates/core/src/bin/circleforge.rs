use clap::Parser;

use circleforge::cli::{execute, CommandConfig};

fn main() {
    let cfg = CommandConfig::parse();
    std::process::exit(execute(&cfg));
}
