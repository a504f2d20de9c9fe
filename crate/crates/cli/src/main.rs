use std::io;
use std::process::ExitCode;

use clap::Parser;
use flowmatch_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli, &mut io::stdout().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("flowmatch: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
