use std::process::ExitCode;

use clap::Parser;
use edgealloc::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    match run(cli, &mut stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("edgealloc: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
