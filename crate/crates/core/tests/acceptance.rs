//! Prints one line per acceptance criterion and fails if any criterion
//! fails. `GONFLOW_ACCEPTANCE=quick` runs the smoke-test scale;
//! `GONFLOW_ACCEPTANCE_ONLY=3,7` restricts the run.

use std::process::ExitCode;

use gonflow::acceptance::{run_criterion, Scale};

fn main() -> ExitCode {
    let scale = match std::env::var("GONFLOW_ACCEPTANCE").as_deref() {
        Ok("quick") => Scale::quick(),
        _ => Scale::full(),
    };
    let only: Option<Vec<u8>> = std::env::var("GONFLOW_ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut ok = true;
    for id in 1..=9u8 {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let report = run_criterion(id, &scale).expect("criteria 1 to 9 exist");
        println!("{}", report.line());
        ok &= report.passed();
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
