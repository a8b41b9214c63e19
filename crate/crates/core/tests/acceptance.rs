//! Runs the twelve reproduction criteria in parallel and prints one line per
//! criterion. Exits nonzero if any fails.

use std::process::ExitCode;
use std::thread;

use permmut::verify::{criteria, run_criterion, Status, VerifyOptions};

fn main() -> ExitCode {
    let options = VerifyOptions::default();
    let all = criteria();
    let outcomes: Vec<_> = thread::scope(|s| {
        let handles: Vec<_> = all.iter().map(|c| s.spawn(|| run_criterion(c, &options))).collect();
        handles.into_iter().map(|h| h.join().expect("criterion panicked")).collect()
    });
    let mut failed = 0;
    for o in &outcomes {
        let mark = match o.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        };
        println!("criterion {:>2} [{mark}] {} ({:.2} s)", o.number, o.title, o.elapsed_ms as f64 / 1000.0);
        for c in &o.report.checks {
            let m = if c.passed { "ok" } else { "FAILED" };
            if c.detail.is_empty() {
                println!("      {m:<6} {}", c.name);
            } else {
                println!("      {m:<6} {}: {}", c.name, c.detail);
            }
        }
        if o.status != Status::Pass {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", outcomes.len() - failed, outcomes.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
