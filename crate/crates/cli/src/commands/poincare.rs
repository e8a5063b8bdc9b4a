//! Stroboscopic sections of the three figure panels.
//!
//! Each panel drives orbits around its resonant action `n_res` at the primary
//! resonance `ω = ω₀(n_res)`, with `ε` set relative to the panel's own closed
//! form `ε_cr(n_res)` at the configured `k`.

use serde::Serialize;

use quarkonium_core::action_angle::{ActionAngleChart, RegimeGates};
use quarkonium_core::chirikov::{epsilon_cr_hydrogen, epsilon_cr_large_a, epsilon_cr_small_a};
use quarkonium_core::dynamics::{
    chaotic_fraction, initial_grid, stroboscopic_section, ChaosConfig, ChaosReport, IntegratorConfig, SectionConfig,
    Trajectory,
};
use quarkonium_core::{CriticalFieldResult, DriveParams, SystemParams};

use crate::config::{Config, Panel, PoincareConfig};
use crate::error::{CliError, Result};
use crate::units::OmegaUnit;

#[derive(Debug, Clone)]
pub struct PanelSetup {
    pub panel: Panel,
    pub params: SystemParams,
    pub n_res: f64,
    pub chart: ActionAngleChart,
    pub omega: f64,
    pub critical: CriticalFieldResult,
}

impl PanelSetup {
    pub fn new(panel: Panel, pc: &PoincareConfig, omega: Option<f64>) -> Result<Self> {
        let (params, n_res) = match panel {
            Panel::A => (SystemParams::hydrogen(pc.z)?, pc.n_res_hydrogen),
            Panel::B => (SystemParams::new(pc.z, pc.lambda)?, pc.n_res_small_a),
            Panel::C => (SystemParams::new(pc.z, pc.lambda)?, pc.n_res_large_a),
        };
        if !(n_res > 0.0) {
            return Err(CliError::config("poincare.n_res", format!("{n_res} must be > 0")));
        }
        let chart = ActionAngleChart::from_action_range(&params, 0.2 * n_res, 20.0 * n_res, 256)?;
        let omega = match omega {
            Some(w) => w,
            None => chart.omega0_at_action(n_res)?,
        };
        let gates = RegimeGates::default();
        let critical = match panel {
            Panel::A => epsilon_cr_hydrogen(n_res, pc.k, omega, params.z)?,
            Panel::B => epsilon_cr_small_a(n_res, pc.k, omega, &params, &gates)?,
            Panel::C => epsilon_cr_large_a(n_res, pc.k, omega, &params, &gates)?,
        };
        Ok(Self {
            panel,
            params,
            n_res,
            chart,
            omega,
            critical,
        })
    }

    pub fn drive(&self, eps_over_eps_cr: f64) -> Result<DriveParams> {
        Ok(DriveParams::new(
            eps_over_eps_cr * self.critical.epsilon_cr,
            self.omega,
        )?)
    }

    pub fn initials(&self, pc: &PoincareConfig) -> Vec<quarkonium_core::dynamics::InitialCondition> {
        initial_grid(self.n_res, &pc.circle_factors, pc.thetas_per_circle)
    }
}

/// Summary of one panel, for the metadata sidecar.
#[derive(Debug, Clone, Serialize)]
pub struct PanelSummary {
    pub panel: Panel,
    pub z: f64,
    pub lambda: f64,
    pub n_res: f64,
    pub omega: f64,
    pub epsilon_cr: f64,
    pub regime_gate_ok: bool,
    pub epsilon: f64,
    pub trajectories: usize,
    pub completed: usize,
    pub escaped: usize,
    pub step_failures: usize,
    pub chaos: Option<ChaosReport>,
}

#[derive(Debug, Clone)]
pub struct PanelRun {
    pub summary: PanelSummary,
    pub trajectories: Vec<Trajectory>,
}

fn drive_override(cfg: &Config) -> Result<Option<f64>> {
    match (cfg.drive.omega, cfg.drive.omega_unit) {
        (None, _) => Ok(None),
        (Some(w), None | Some(OmegaUnit::Natural)) => Ok(Some(w)),
        (Some(_), Some(u)) => Err(CliError::config(
            "drive.omega_unit",
            format!("figure panels run in core units; {u} is not accepted here"),
        )),
    }
}

pub fn run_poincare(cfg: &Config) -> Result<Vec<PanelRun>> {
    let pc = &cfg.poincare;
    if pc.panels.is_empty() {
        return Err(CliError::Usage("no panels requested".into()));
    }
    if pc.circle_factors.is_empty() || pc.thetas_per_circle == 0 {
        return Err(CliError::config("poincare", "empty initial-condition grid"));
    }
    let ratio = cfg.poincare_eps_over_eps_cr()?;
    let omega = drive_override(cfg)?;
    let section = SectionConfig {
        n_periods: pc.periods,
        escape_factor: pc.escape_factor,
        integrator: IntegratorConfig {
            steps_per_orbit: pc.steps_per_orbit,
            ..IntegratorConfig::default()
        },
        ..SectionConfig::default()
    };
    let mut runs = Vec::new();
    for &panel in &pc.panels {
        let setup = PanelSetup::new(panel, pc, omega)?;
        let d = setup.drive(ratio)?;
        let initials = setup.initials(pc);
        log::info!(
            "panel {}: ω = {:.6e}, ε_cr = {:.6e}, ε = {:.6e}",
            panel.as_str(),
            setup.omega,
            setup.critical.epsilon_cr,
            d.epsilon
        );
        let trajectories = stroboscopic_section(&initials, &section, &setup.chart, &d)?;
        let chaos = if pc.chaos {
            let cc = ChaosConfig {
                n_periods: pc.periods,
                escape_factor: pc.escape_factor,
                ..ChaosConfig::default()
            };
            Some(chaotic_fraction(&initials, &cc, &setup.chart, &d)?)
        } else {
            None
        };
        use quarkonium_core::dynamics::TrajectoryTag as T;
        let count = |tag: T| trajectories.iter().filter(|t| t.tag == tag).count();
        runs.push(PanelRun {
            summary: PanelSummary {
                panel,
                z: setup.params.z,
                lambda: setup.params.lambda,
                n_res: setup.n_res,
                omega: setup.omega,
                epsilon_cr: setup.critical.epsilon_cr,
                regime_gate_ok: setup.critical.regime_gate_ok,
                epsilon: d.epsilon,
                trajectories: trajectories.len(),
                completed: count(T::Completed),
                escaped: count(T::Escaped),
                step_failures: count(T::StepFailure),
                chaos,
            },
            trajectories,
        });
    }
    Ok(runs)
}

/// Section CSV with a leading `panel` column.
pub fn write_poincare_csv<W: std::io::Write>(runs: &[PanelRun], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["panel", "trajectory_id", "m", "t", "x", "p", "n", "theta", "tag"])?;
    let opt = crate::sidecar::opt_num;
    for run in runs {
        for tr in &run.trajectories {
            for pt in &tr.points {
                wr.write_record([
                    run.summary.panel.as_str().to_string(),
                    pt.trajectory_id.to_string(),
                    pt.m.to_string(),
                    crate::sidecar::num(pt.t),
                    crate::sidecar::num(pt.x),
                    crate::sidecar::num(pt.p),
                    opt(pt.n),
                    opt(pt.theta),
                    tr.tag.as_str().to_string(),
                ])?;
            }
        }
    }
    wr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RatioForm;

    fn small(eps_ratio: f64) -> Config {
        let mut cfg = Config::default();
        cfg.drive.eps_ratio = Some(eps_ratio);
        cfg.drive.ratio_form = RatioForm::EpsOverEpsCr;
        cfg.poincare.periods = 20;
        cfg.poincare.thetas_per_circle = 3;
        cfg.poincare.circle_factors = vec![0.9, 1.1];
        cfg
    }

    #[test]
    fn undriven_panels_stay_on_circles() {
        let runs = run_poincare(&small(0.0)).unwrap();
        assert_eq!(runs.len(), 3);
        for run in &runs {
            assert_eq!(run.summary.completed, 6);
            for tr in &run.trajectories {
                for pt in &tr.points {
                    assert!((pt.n.unwrap() / tr.initial.n - 1.0).abs() < 1e-7);
                }
            }
        }
    }

    #[test]
    fn figure_presets_set_the_ratio() {
        let mut cfg = Config::default();
        for (fig, ratio) in [(2, 10.0), (3, 2.0), (4, 1.0 / 0.9)] {
            cfg.poincare.figure = Some(fig);
            assert!((cfg.poincare_eps_over_eps_cr().unwrap() - ratio).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_has_one_row_per_point() {
        let runs = run_poincare(&small(0.5)).unwrap();
        let mut buf = Vec::new();
        write_poincare_csv(&runs, &mut buf).unwrap();
        let points: usize = runs.iter().flat_map(|r| &r.trajectories).map(|t| t.points.len()).sum();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), points + 1);
    }
}
