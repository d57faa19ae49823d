//! Family sweep: generate every source-level term within bounds, pair each
//! with every verdict assignment, and check both correspondence directions
//! plus the delayed-abort shape on all of them.
//!
//! The default bounds keep the run in seconds; pass bounds on the command
//! line for the full desk-scale sweep (minutes):
//!
//! ```bash
//! cargo run --release -p sagas --example conformance_sweep
//! cargo run --release -p sagas --example conformance_sweep -- 3 2
//! ```

use sagas::conformance::{check_family, GenBounds};
use sagas::dynamic_semantics::DYNAMIC_RULES;
use sagas::static_semantics::STATIC_RULES;

fn main() {
    let mut args = std::env::args().skip(1);
    let max_activities: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(2);
    let max_depth: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(2);
    let bounds = GenBounds::exhaustive(max_activities, max_depth, &["a", "b"]);

    let started = std::time::Instant::now();
    let report = check_family(&bounds).unwrap();
    println!(
        "checked {} subjects over {} terms in {:?}",
        report.subjects,
        report.terms,
        started.elapsed()
    );
    println!(
        "computations: {}, judgments: {}, null-reading divergences: {}",
        report.computations, report.judgments, report.null_divergences
    );
    println!(
        "dynamic-to-static: {}",
        verdict(report.dynamic_to_static_failures.len())
    );
    println!(
        "static-to-dynamic: {}",
        verdict(report.static_to_dynamic_failures.len())
    );
    println!("dagger shape:      {}", verdict(report.dagger_failures.len()));
    for r in report
        .dynamic_to_static_failures
        .iter()
        .chain(&report.static_to_dynamic_failures)
        .take(5)
    {
        println!("  failing subject: {}", r.subject.process);
    }
    println!(
        "static rules never fired: {:?}",
        report.static_coverage.missing(&STATIC_RULES)
    );
    println!(
        "dynamic rules never fired: {:?}",
        report.dynamic_coverage.missing(&DYNAMIC_RULES)
    );
}

fn verdict(failures: usize) -> String {
    if failures == 0 {
        "PASS".to_string()
    } else {
        format!("FAIL ({failures} subjects)")
    }
}
