//! Invariant suite with a structured pass/fail report.

use serde::Serialize;

use crate::checks::{convention_constants, invariant_suite, CheckGroup, ConventionConstant, Fault};

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub fault: Fault,
    pub groups: Vec<CheckGroup>,
    pub constants: Vec<ConventionConstant>,
}

pub fn run_validate(fault: Fault) -> ValidationReport {
    let groups = invariant_suite(fault);
    ValidationReport {
        passed: groups.iter().all(CheckGroup::passed),
        fault,
        groups,
        constants: convention_constants(),
    }
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn write_report_text<W: std::io::Write>(r: &ValidationReport, mut w: W) -> std::io::Result<()> {
    for g in &r.groups {
        let limit = g.time_limit.map(|t| format!(" (limit {t} s)")).unwrap_or_default();
        writeln!(w, "[{}] {}  {:.2} s{limit}", mark(g.passed()), g.name, g.seconds)?;
        for c in &g.checks {
            let detail = if c.detail.is_empty() {
                String::new()
            } else {
                format!("  {}", c.detail)
            };
            if c.condition {
                writeln!(w, "    {} {}{detail}", mark(c.passed), c.name)?;
            } else {
                writeln!(
                    w,
                    "    {} {}: {:.3e} ≤ {:.1e}{detail}",
                    mark(c.passed),
                    c.name,
                    c.value,
                    c.limit
                )?;
            }
        }
        for n in &g.notes {
            writeln!(w, "    note: {n}")?;
        }
    }
    writeln!(w, "convention constants:")?;
    for c in &r.constants {
        writeln!(w, "    {} = {}  ({})", c.name, c.value, c.role)?;
    }
    writeln!(
        w,
        "{}",
        if r.passed {
            "all checks passed"
        } else {
            "validation FAILED"
        }
    )
}
