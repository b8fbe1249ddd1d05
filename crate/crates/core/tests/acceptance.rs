//! Acceptance checks, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are printed whether or not a check fails.
//!
//! `cargo test --test acceptance -- 1 8` runs a subset.

use std::process::ExitCode;

use diaboli::acceptance;

fn main() -> ExitCode {
    let wanted: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let ids: Vec<&str> = acceptance::IDS
        .iter()
        .copied()
        .filter(|id| wanted.is_empty() || wanted.iter().any(|w| w.eq_ignore_ascii_case(id)))
        .collect();
    let mut failed = Vec::new();
    for id in &ids {
        let r = acceptance::run(id).expect("known id");
        println!("{r}");
        for line in &r.log {
            println!("    {line}");
        }
        if !r.passed {
            failed.push(*id);
        }
    }
    println!("\nacceptance: {} passed, {} failed {:?}", ids.len() - failed.len(), failed.len(), failed);
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
