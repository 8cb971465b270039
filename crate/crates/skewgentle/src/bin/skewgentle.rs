//! Command-line front end.

use std::io::Write;

use clap::Parser;
use skewgentle::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let (output, code) = run(&cli.command);
    let mut stdout = std::io::stdout().lock();
    // a closed pipe is not worth a panic
    let _ = writeln!(stdout, "{}", output.render());
    std::process::exit(code);
}
