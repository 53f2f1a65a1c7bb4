//! Acceptance criteria C1..C11 on the default suite. Prints one line per criterion.

use std::process::ExitCode;

use mhdecay_core::suite::{suite_settings, verify, Status, CRITERIA};

fn main() -> ExitCode {
    let report = verify(&suite_settings("default").expect("default suite"));
    for r in &report.results {
        println!("{r}");
    }
    let mut ok = report.results.len() == CRITERIA.len();
    ok &= report.results.iter().enumerate().all(|(n, r)| r.id as usize == n + 1 && r.status == Status::Pass);

    // without evolution only the static criteria run, so the suite must not pass
    let partial = verify(&suite_settings("no-evolution").expect("no-evolution suite"));
    let skipped = partial.results.iter().filter(|r| r.status == Status::Skipped).count();
    let sane = !partial.all_passed() && skipped > 0;
    println!(
        "{} no-evolution suite reports {skipped} skipped criteria and is not accepted",
        if sane { "PASS" } else { "FAIL" }
    );
    ok &= sane;

    println!("acceptance: {}", if ok { "ok" } else { "FAILED" });
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
