use std::process::ExitCode;

use clap::Parser;
use selstream::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    match run(cli, &mut stdout.lock(), &mut stderr.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("selstream: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
