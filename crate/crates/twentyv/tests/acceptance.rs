//! One pass/fail line per acceptance criterion.
//!
//! Runs the full statistical level unless `TWENTYV_ACCEPTANCE_LEVEL=quick`.
//! The full level takes about ten minutes on a single core.
//! Built without the libtest harness so the table is never captured.

use std::process::ExitCode;
use twentyv::validation::{run_all, Level};

fn main() -> ExitCode {
    let level = match std::env::var("TWENTYV_ACCEPTANCE_LEVEL") {
        Ok(s) => match s.parse::<Level>() {
            Ok(l) => l,
            Err(e) => {
                eprintln!("{e}");
                return ExitCode::FAILURE;
            }
        },
        Err(_) => Level::Full,
    };
    let seed = std::env::var("TWENTYV_ACCEPTANCE_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(2024);
    println!("acceptance: {level:?} level, seed {seed}");
    let reports = run_all(level, seed);
    for r in &reports {
        println!("{r}");
    }
    let passed = reports.iter().filter(|r| r.passed).count();
    println!("{passed}/{} criteria passed", reports.len());
    if passed == reports.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
