use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = evrgbd_cli::Cli::parse();
    match evrgbd_cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
