use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use fibmahler::cli::{error_code, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut err = io::stderr();
    let code = match run(&cli, &mut out, &mut err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            error_code(&e)
        }
    };
    let _ = out.flush();
    ExitCode::from(code as u8)
}
