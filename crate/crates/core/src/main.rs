use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use crystalkit::cli::{execute, Cli, EXIT_INPUT};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let code = match execute(cli, &mut out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    };
    let _ = out.flush();
    ExitCode::from(code as u8)
}
