use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use thermoyield::cli::{exit_code, run, RunConfig};

fn main() -> ExitCode {
    let config = RunConfig::parse();
    let result = run(&config).and_then(|text| match &config.shared.out {
        Some(path) => fs::write(path, text).map_err(Into::into),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(Into::into),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
