//! One PASS/FAIL line per acceptance criterion, default configuration.
//!
//! Criteria listed in `EXPECTED_FAIL` are implemented as stated and fail on
//! this data. The target exits nonzero if any other criterion fails, runs
//! over its wall-clock budget, or if an expected failure starts passing.

use std::process::ExitCode;

use hombundle_core::certify::{budget_secs, certify, CertifyConfig};

const EXPECTED_FAIL: [u32; 4] = [3, 4, 5, 6];

fn main() -> ExitCode {
    let cfg = CertifyConfig::default();
    let mut surprises = Vec::new();
    let cert = certify(&cfg, |c, took| {
        let secs = took.as_secs_f64();
        let budget = budget_secs(c.id);
        let in_budget = secs <= budget;
        let pass = c.passed && in_budget;
        let note = match (pass, EXPECTED_FAIL.contains(&c.id)) {
            (false, true) => "  (expected)",
            (true, true) => "  (unexpected pass)",
            (false, false) => "  (unexpected failure)",
            (true, false) => "",
        };
        println!(
            "{} [{:>2}] {:<38} {:>9.3}s / {:>6.0}s budget{}",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            secs,
            budget,
            note
        );
        if pass == EXPECTED_FAIL.contains(&c.id) {
            surprises.push(c.id);
        }
    })
    .expect("certification runs");
    println!(
        "{} of {} criteria pass; digest {}",
        cert.checks.iter().filter(|c| c.passed).count(),
        cert.checks.len(),
        cert.digest
    );
    if surprises.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected outcome for criteria {surprises:?}");
        ExitCode::FAILURE
    }
}
