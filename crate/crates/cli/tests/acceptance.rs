//! Acceptance suite: one PASS/FAIL line per criterion, then the measured
//! values.
//!
//! Criteria in `KNOWN_FAILURES` fail for reasons outside the implementation
//! and are reported as FAIL without failing the run, so that `cargo test`
//! goes on to the remaining test binaries. Any other failure, or a known
//! failure that starts passing, exits nonzero. `ACCEPTANCE_STRICT=1` makes
//! every failure fatal.

use std::process::ExitCode;

use quarkonium_cli::checks::{
    action_coherence, chaos_ordering, criterion_coherence, critical_curve_shapes, dynamics_integrity,
    elliptic_identities, frequency_consistency, resonance_algebra, table_structure, CheckGroup, Fault,
    LargeOrbitFrequency,
};

const KNOWN_FAILURES: [(usize, &str); 3] = [
    (
        3,
        "the printed large-orbit frequency is not the derivative of its own energy formula",
    ),
    (
        6,
        "the printed large-orbit critical field decreases monotonically on [1, 20]",
    ),
    (
        9,
        "the square-root width law scales with n differently from the closed forms",
    ),
];

fn known_failure(number: usize) -> Option<&'static str> {
    KNOWN_FAILURES.iter().find(|(n, _)| *n == number).map(|(_, why)| *why)
}

fn report(number: usize, g: &CheckGroup) {
    let verdict = if g.passed() { "PASS" } else { "FAIL" };
    let limit = g.time_limit.map(|t| format!(", limit {t} s")).unwrap_or_default();
    let known = match (g.passed(), known_failure(number)) {
        (false, Some(why)) => format!("  (known failure: {why})"),
        (true, Some(_)) => "  (listed as a known failure but passed)".to_string(),
        _ => String::new(),
    };
    println!(
        "criterion {number}: {verdict}  {} ({:.2} s{limit}){known}",
        g.name, g.seconds
    );
    for c in &g.checks {
        let mark = if c.passed { "ok  " } else { "FAIL" };
        let detail = if c.detail.is_empty() {
            String::new()
        } else {
            format!("  [{}]", c.detail)
        };
        if c.condition {
            println!("    {mark} {}{detail}", c.name);
        } else {
            println!("    {mark} {}: {:.3e} (limit {:.1e}){detail}", c.name, c.value, c.limit);
        }
    }
    if !g.within_time() {
        println!("    FAIL runtime {:.2} s over the limit", g.seconds);
    }
    for n in &g.notes {
        println!("    note: {n}");
    }
}

fn main() -> ExitCode {
    // cargo passes libtest flags; `--list` must not run anything
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    let criteria: [fn() -> CheckGroup; 9] = [
        elliptic_identities,
        || action_coherence(Fault::None),
        || frequency_consistency(LargeOrbitFrequency::AsPrinted),
        resonance_algebra,
        table_structure,
        critical_curve_shapes,
        || dynamics_integrity(10_000),
        chaos_ordering,
        criterion_coherence,
    ];
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let mut failed = Vec::new();
    let mut fatal = false;
    for (i, run) in criteria.iter().enumerate() {
        let number = i + 1;
        let g = run();
        report(number, &g);
        let known = known_failure(number).is_some();
        if !g.passed() {
            failed.push(number.to_string());
        }
        fatal |= if g.passed() { known } else { strict || !known };
    }
    if failed.is_empty() {
        println!("acceptance: all 9 criteria passed");
    } else {
        println!(
            "acceptance: {} of 9 criteria passed; failed: {}",
            9 - failed.len(),
            failed.join(", ")
        );
    }
    if fatal {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
