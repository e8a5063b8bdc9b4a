//! Critical field as a function of the action.

use quarkonium_core::action_angle::{ActionAngleChart, RegimeGates};
use quarkonium_core::chirikov::{scan_critical_field, write_scan_csv, ScanSettings};
use quarkonium_core::{ScanMode, ScanRow};

use crate::config::{Config, ResolvedSystem};
use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ScanOutput {
    pub system: ResolvedSystem,
    /// Rows with a value, ordered by `n` then mode.
    pub rows: Vec<ScanRow>,
    /// Points where an estimate could not be evaluated.
    pub gaps: Vec<ScanRow>,
}

pub fn run_scan(cfg: &Config) -> Result<ScanOutput> {
    let sys = cfg.resolve_system()?;
    let omega = sys.require_omega()?;
    let s = &cfg.scan;
    if s.modes.is_empty() {
        return Err(CliError::Usage("no scan modes requested".into()));
    }
    let grid = s.grid()?;
    let chart = if s.modes.contains(&ScanMode::Numeric) {
        Some(ActionAngleChart::from_action_range(
            &sys.params,
            0.2 * s.n_min,
            20.0 * s.n_max,
            256,
        )?)
    } else {
        None
    };
    let settings = ScanSettings {
        k: cfg.critical.k,
        gates: RegimeGates::default(),
        chirikov: cfg.critical.chirikov(),
        chart: chart.as_ref(),
    };
    let all = scan_critical_field(&grid, omega, &s.modes, &sys.params, &settings)?;
    let (rows, gaps): (Vec<ScanRow>, Vec<ScanRow>) = all.into_iter().partition(|r| r.epsilon_cr.is_some());
    for g in &gaps {
        log::warn!(
            "no {} estimate at n = {}: {}",
            g.mode.as_str(),
            g.n,
            g.error.as_deref().unwrap_or("")
        );
    }
    Ok(ScanOutput {
        system: sys,
        rows,
        gaps,
    })
}

pub fn write_scan<W: std::io::Write>(out: &ScanOutput, w: W) -> Result<()> {
    write_scan_csv(&out.rows, w)?;
    Ok(())
}
