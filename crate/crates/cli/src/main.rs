//! adsdeform: causal structure, invariant B-field and non-formal deformation
//! products for BTZ quotients of AdS3, with a machine-checkable verification
//! suite.
//!
//! Exit codes: 0 success, 2 configuration error, 3 verification failure,
//! 4 I/O error.

mod args;
mod commands;
mod config;
mod emit;
mod pool;

use std::process::ExitCode;

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    match commands::dispatch(&argv) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
