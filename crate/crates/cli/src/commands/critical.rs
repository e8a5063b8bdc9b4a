//! Critical field at chosen actions, and the comparison with the published tables.

use serde::Serialize;

use quarkonium_core::action_angle::{ActionAngleChart, RegimeGates};
use quarkonium_core::chirikov::{
    epsilon_cr_3d, epsilon_cr_hydrogen, epsilon_cr_large_a, epsilon_cr_numeric, epsilon_cr_small_a,
};
use quarkonium_core::{ChirikovConfig, CriticalFieldResult, SystemParams};

use crate::config::{Config, CriticalMode, MassConvention, ResolvedSystem};
use crate::error::{CliError, Result};
use crate::presets::{TableFormula, PRESETS, TABLE_ACTIONS};
use crate::units::{OmegaUnit, UnitContext};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalRow {
    pub n: f64,
    pub mode: CriticalMode,
    /// Core (unit-mass) field.
    pub epsilon_cr: Option<f64>,
    pub epsilon_cr_gev2: Option<f64>,
    pub epsilon_cr_v_per_fm: Option<f64>,
    pub k: u32,
    pub regime_gate_ok: bool,
    pub error: Option<String>,
}

/// One estimate in core units.
pub fn critical_field(
    mode: CriticalMode,
    n: f64,
    k: u32,
    omega: f64,
    p: &SystemParams,
    chirikov: &ChirikovConfig,
) -> quarkonium_core::Result<CriticalFieldResult> {
    let gates = RegimeGates::default();
    match mode {
        CriticalMode::Hydrogen => epsilon_cr_hydrogen(n, k, omega, p.z),
        CriticalMode::SmallA => epsilon_cr_small_a(n, k, omega, p, &gates),
        CriticalMode::LargeA => epsilon_cr_large_a(n, k, omega, p, &gates),
        CriticalMode::ThreeD => epsilon_cr_3d(n, k, omega, p, &gates),
        CriticalMode::Numeric => {
            let chart = ActionAngleChart::from_action_range(p, 0.2 * n, 20.0 * n, 256)?;
            epsilon_cr_numeric(n, omega, &chart, chirikov)
        }
    }
}

fn row(
    mode: CriticalMode,
    n: f64,
    k: u32,
    r: quarkonium_core::Result<CriticalFieldResult>,
    units: Option<&UnitContext>,
) -> CriticalRow {
    match r {
        Ok(r) => CriticalRow {
            n,
            mode,
            epsilon_cr: Some(r.epsilon_cr),
            epsilon_cr_gev2: units.map(|u| u.field_from_core(r.epsilon_cr)),
            epsilon_cr_v_per_fm: units.map(|u| u.core_field_to_v_per_fm(r.epsilon_cr)),
            k: r.k_pair.0,
            regime_gate_ok: r.regime_gate_ok,
            error: None,
        },
        Err(e) => CriticalRow {
            n,
            mode,
            epsilon_cr: None,
            epsilon_cr_gev2: None,
            epsilon_cr_v_per_fm: None,
            k,
            regime_gate_ok: false,
            error: Some(e.to_string()),
        },
    }
}

/// Every `(n, mode)` of the `[critical]` table; per-point failures stay in the rows.
pub fn critical_field_rows(cfg: &Config) -> Result<(ResolvedSystem, Vec<CriticalRow>)> {
    let sys = cfg.resolve_system()?;
    let omega = sys.require_omega()?;
    let c = &cfg.critical;
    if c.modes.is_empty() {
        return Err(CliError::Usage("no critical-field modes requested".into()));
    }
    if c.n.is_empty() {
        return Err(CliError::config("critical.n", "no actions given"));
    }
    if c.k == 0 {
        return Err(CliError::config("critical.k", "must be ≥ 1"));
    }
    let chirikov = c.chirikov();
    let mut rows = Vec::with_capacity(c.n.len() * c.modes.len());
    for &n in &c.n {
        for &mode in &c.modes {
            let r = critical_field(mode, n, c.k, omega, &sys.params, &chirikov);
            let out = row(mode, n, c.k, r, sys.units.as_ref());
            if let (Some(eps), Some(u)) = (out.epsilon_cr, sys.units.as_ref()) {
                log::info!("n = {n}, {}: {}", mode.as_str(), u.field_chain(eps));
            }
            rows.push(out);
        }
    }
    Ok((sys, rows))
}

pub fn write_critical_csv<W: std::io::Write>(rows: &[CriticalRow], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record([
        "n",
        "mode",
        "epsilon_cr",
        "epsilon_cr_gev2",
        "epsilon_cr_v_per_fm",
        "k",
        "regime_gate_ok",
        "error",
    ])?;
    let opt = crate::sidecar::opt_num;
    for r in rows {
        wr.write_record([
            crate::sidecar::num(r.n),
            r.mode.as_str().to_string(),
            opt(r.epsilon_cr),
            opt(r.epsilon_cr_gev2),
            opt(r.epsilon_cr_v_per_fm),
            r.k.to_string(),
            r.regime_gate_ok.to_string(),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

/// One published entry recomputed under one reading of the drive frequency.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub preset: &'static str,
    pub table: u8,
    pub n: f64,
    pub formula: TableFormula,
    /// Whether the table was published with this formula.
    pub formula_as_published: bool,
    pub omega_unit: OmegaUnit,
    pub omega_core: f64,
    pub lambda_core: f64,
    pub epsilon_cr_core: Option<f64>,
    pub epsilon_cr_v_per_fm: Option<f64>,
    pub published_v_per_fm: f64,
    /// `log10(computed / published)`.
    pub log10_ratio: Option<f64>,
    pub error: Option<String>,
}

/// Mean `|log10 ratio|` of one table under one formula and frequency reading.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableFit {
    pub table: u8,
    pub formula: TableFormula,
    pub omega_unit: OmegaUnit,
    pub mean_abs_log10_ratio: f64,
    /// Mean over presets of computed `ε(5)/ε(10)` divided by the published ratio.
    pub n_ratio_agreement: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableReport {
    pub mass_convention: MassConvention,
    pub rows: Vec<TableRow>,
    pub fits: Vec<TableFit>,
    /// Best `(formula, unit)` per table by mean `|log10 ratio|`.
    pub best: Vec<TableFit>,
}

/// Recomputes both tables with both closed forms under every frequency reading.
pub fn table_comparison(mass: MassConvention, k: u32) -> Result<TableReport> {
    let omega_value = crate::presets::TABLE_OMEGA_HZ;
    let mut rows = Vec::new();
    for preset in PRESETS {
        let units = UnitContext::new(preset.quark_mass_mev * mass.factor())?;
        let lambda = units.lambda_to_core(preset.lambda_gev2);
        let p = SystemParams::new(preset.z(), lambda)?;
        for unit in OmegaUnit::ALL {
            let omega = units.omega_to_core(omega_value, unit);
            for formula in [TableFormula::SmallA, TableFormula::LargeA] {
                let mode = match formula {
                    TableFormula::SmallA => CriticalMode::SmallA,
                    TableFormula::LargeA => CriticalMode::LargeA,
                };
                for (i, &n) in TABLE_ACTIONS.iter().enumerate() {
                    let r = critical_field(mode, n, k, omega, &p, &ChirikovConfig::default());
                    let published = preset.published_v_per_fm[i];
                    let (eps, err) = match r {
                        Ok(r) => (Some(r.epsilon_cr), None),
                        Err(e) => (None, Some(e.to_string())),
                    };
                    let vfm = eps.map(|e| units.core_field_to_v_per_fm(e));
                    rows.push(TableRow {
                        preset: preset.name,
                        table: preset.table,
                        n,
                        formula,
                        formula_as_published: formula == preset.table_formula,
                        omega_unit: unit,
                        omega_core: omega,
                        lambda_core: lambda,
                        epsilon_cr_core: eps,
                        epsilon_cr_v_per_fm: vfm,
                        published_v_per_fm: published,
                        log10_ratio: vfm.filter(|v| *v > 0.0).map(|v| (v / published).log10()),
                        error: err,
                    });
                }
            }
        }
    }

    let mut fits = Vec::new();
    for table in [1u8, 2] {
        for formula in [TableFormula::SmallA, TableFormula::LargeA] {
            for unit in OmegaUnit::ALL {
                let sel: Vec<&TableRow> = rows
                    .iter()
                    .filter(|r| r.table == table && r.formula == formula && r.omega_unit == unit)
                    .collect();
                let logs: Vec<f64> = sel.iter().filter_map(|r| r.log10_ratio.map(f64::abs)).collect();
                let mean = if logs.len() == sel.len() && !logs.is_empty() {
                    logs.iter().sum::<f64>() / logs.len() as f64
                } else {
                    f64::INFINITY
                };
                let mut ratios = Vec::new();
                for preset in PRESETS.iter().filter(|p| p.table == table) {
                    let at = |n: f64| {
                        sel.iter()
                            .find(|r| r.preset == preset.name && r.n == n)
                            .and_then(|r| r.epsilon_cr_core)
                    };
                    if let (Some(e5), Some(e10)) = (at(5.0), at(10.0)) {
                        let published = preset.published_v_per_fm[0] / preset.published_v_per_fm[2];
                        ratios.push(e5 / e10 / published);
                    }
                }
                let n_ratio_agreement = if ratios.is_empty() {
                    f64::NAN
                } else {
                    ratios.iter().sum::<f64>() / ratios.len() as f64
                };
                fits.push(TableFit {
                    table,
                    formula,
                    omega_unit: unit,
                    mean_abs_log10_ratio: mean,
                    n_ratio_agreement,
                });
            }
        }
    }
    let best = [1u8, 2]
        .iter()
        .filter_map(|&t| {
            fits.iter()
                .filter(|f| f.table == t)
                .min_by(|a, b| a.mean_abs_log10_ratio.total_cmp(&b.mean_abs_log10_ratio))
                .cloned()
        })
        .collect();
    Ok(TableReport {
        mass_convention: mass,
        rows,
        fits,
        best,
    })
}

pub fn write_table_csv<W: std::io::Write>(rows: &[TableRow], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record([
        "preset",
        "table",
        "n",
        "formula",
        "formula_as_published",
        "omega_unit",
        "omega_core",
        "lambda_core",
        "epsilon_cr_core",
        "epsilon_cr_v_per_fm",
        "published_v_per_fm",
        "log10_ratio",
    ])?;
    let opt = crate::sidecar::opt_num;
    for r in rows {
        let formula = match r.formula {
            TableFormula::SmallA => "small_a",
            TableFormula::LargeA => "large_a",
        };
        wr.write_record([
            r.preset.to_string(),
            r.table.to_string(),
            crate::sidecar::num(r.n),
            formula.to_string(),
            r.formula_as_published.to_string(),
            r.omega_unit.to_string(),
            crate::sidecar::num(r.omega_core),
            crate::sidecar::num(r.lambda_core),
            opt(r.epsilon_cr_core),
            opt(r.epsilon_cr_v_per_fm),
            crate::sidecar::num(r.published_v_per_fm),
            opt(r.log10_ratio),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_rows_carry_physical_units() {
        let mut cfg = Config::default();
        cfg.system.preset = Some("cc".into());
        cfg.critical.n = vec![5.0, 10.0];
        let (sys, rows) = critical_field_rows(&cfg).unwrap();
        assert_eq!(rows.len(), 4);
        let u = sys.units.unwrap();
        for r in rows.iter().filter(|r| r.epsilon_cr.is_some()) {
            let v = r.epsilon_cr_v_per_fm.unwrap();
            assert!((u.v_per_fm_to_core_field(v) / r.epsilon_cr.unwrap() - 1.0).abs() < 1e-12);
        }
        let small: Vec<f64> = rows
            .iter()
            .filter(|r| r.mode == CriticalMode::SmallA)
            .map(|r| r.epsilon_cr.unwrap())
            .collect();
        assert!((small[0] / small[1] / 4.0 - 1.0).abs() < 0.01);
    }

    #[test]
    fn empty_modes_are_a_usage_error() {
        let mut cfg = Config::default();
        cfg.system.preset = Some("cc".into());
        cfg.critical.modes.clear();
        assert_eq!(critical_field_rows(&cfg).unwrap_err().exit_code(), 1);
    }

    #[test]
    fn table_report_covers_every_reading() {
        let rep = table_comparison(MassConvention::Quark, 1).unwrap();
        assert_eq!(rep.rows.len(), 5 * 3 * 2 * 3);
        assert_eq!(rep.fits.len(), 2 * 2 * 3);
        assert_eq!(rep.best.len(), 2);
    }
}
