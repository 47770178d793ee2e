//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use anharmonic::cli::verify::{self, SuiteOptions};
use std::time::Instant;

fn main() {
    let options = SuiteOptions::default();
    let mut failed = Vec::new();
    for id in 1..=10u8 {
        let start = Instant::now();
        let report = verify::run_one(id, &options).expect("criteria are numbered 1 to 10");
        println!("{report}");
        println!("    ({:.2} s)", start.elapsed().as_secs_f64());
        if !report.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 10 criteria passed");
    } else {
        println!("acceptance: {} of 10 criteria failed: {failed:?}", failed.len());
        std::process::exit(1);
    }
}
