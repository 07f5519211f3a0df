//! Runs the ten acceptance criteria at their stated tolerances and prints one
//! line per criterion. Exits nonzero if any criterion fails.

use std::process::ExitCode;

use lipdist::validate::{Settings, CRITERIA};

fn main() -> ExitCode {
    let settings = Settings::default();
    let mut failed = 0;
    for criterion in CRITERIA {
        let r = criterion(&settings);
        println!("{}", r.line());
        if !r.passed {
            failed += 1;
            for d in &r.details {
                println!("    {d}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", CRITERIA.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
