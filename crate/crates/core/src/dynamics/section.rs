//! Stroboscopic sections at `t = t₀ + 2πm/ω`.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::action_angle::{angle_of_x, ActionAngleChart, Branch};
use crate::error::{Error, Result};
use crate::potential::{potential_1d, turning_points_1d, DriveParams, SystemParams};
use crate::roots::brent_try;

use super::integrator::{advance_to_time, unperturbed_energy, Advance, IntegratorConfig, PhaseState, RegularizedState};

pub const DEFAULT_CIRCLE_FACTORS: [f64; 5] = [0.8, 0.9, 1.0, 1.1, 1.2];
pub const DEFAULT_THETAS_PER_CIRCLE: usize = 20;
pub const DEFAULT_PERIODS: usize = 500;
/// Escape radius in units of the initial outer turning point.
pub const DEFAULT_ESCAPE_FACTOR: f64 = 20.0;

/// A point `(n, θ)` on an unperturbed invariant circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialCondition {
    pub n: f64,
    pub theta: f64,
}

/// `per_circle` equispaced angles on each circle `n = f·n_res`.
pub fn initial_grid(n_res: f64, factors: &[f64], per_circle: usize) -> Vec<InitialCondition> {
    factors
        .iter()
        .flat_map(|f| {
            (0..per_circle).map(move |j| InitialCondition {
                n: f * n_res,
                theta: TAU * j as f64 / per_circle as f64,
            })
        })
        .collect()
}

/// Physical position and momentum at angle `theta` on the orbit of energy `energy`.
pub fn phase_point(energy: f64, theta: f64, p: &SystemParams) -> Result<(f64, f64)> {
    let a = turning_points_1d(energy, p)?.a;
    let theta = theta.rem_euclid(TAU);
    if theta == 0.0 {
        return Ok((0.0, f64::INFINITY));
    }
    let (target, sign) = if theta <= PI { (theta, 1.0) } else { (TAU - theta, -1.0) };
    let f = |x: f64| -> Result<f64> {
        if x <= 0.0 {
            return Ok(-target);
        }
        Ok(angle_of_x(x.min(a), energy, Branch::Outgoing, p)? - target)
    };
    let x = if (target - PI).abs() < 1e-15 {
        a
    } else {
        brent_try("phase_point", f, 0.0, a, 1e-15 * a)?
    };
    let kinetic = (energy - potential_1d(x, p)?).max(0.0);
    Ok((x, sign * (2.0 * kinetic).sqrt()))
}

/// Regularized initial state for `ic` at time `t0`.
pub fn state_from_action_angle(
    ic: &InitialCondition,
    t0: f64,
    chart: &ActionAngleChart,
    d: &DriveParams,
) -> Result<RegularizedState> {
    let p = chart.params();
    let e = chart.energy(ic.n)?;
    let (x, mom) = phase_point(e, ic.theta, p)?;
    if x == 0.0 {
        // the drive term vanishes at the wall
        return Ok(RegularizedState::at_wall(e, t0, p));
    }
    RegularizedState::from_phase(&PhaseState { x, p: mom, t: t0 }, p, d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryTag {
    Completed,
    Escaped,
    StepFailure,
}

impl TrajectoryTag {
    pub fn as_str(self) -> &'static str {
        match self {
            TrajectoryTag::Completed => "completed",
            TrajectoryTag::Escaped => "escaped",
            TrajectoryTag::StepFailure => "step-failure",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionPoint {
    pub trajectory_id: usize,
    pub m: usize,
    pub t: f64,
    pub x: f64,
    pub p: f64,
    /// Unperturbed action and angle, when the unperturbed energy is on the chart.
    pub n: Option<f64>,
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub id: usize,
    pub tag: TrajectoryTag,
    pub initial: InitialCondition,
    pub points: Vec<SectionPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionConfig {
    pub n_periods: usize,
    pub t0: f64,
    pub escape_factor: f64,
    pub integrator: IntegratorConfig,
}

impl Default for SectionConfig {
    fn default() -> Self {
        Self {
            n_periods: DEFAULT_PERIODS,
            t0: 0.0,
            escape_factor: DEFAULT_ESCAPE_FACTOR,
            integrator: IntegratorConfig::default(),
        }
    }
}

/// One trajectory advanced section by section.
#[derive(Debug, Clone)]
pub(crate) struct Propagator {
    pub state: RegularizedState,
    dtau: f64,
    x_escape: f64,
    cfg: IntegratorConfig,
    params: SystemParams,
    drive: DriveParams,
}

impl Propagator {
    pub fn new(
        state: RegularizedState,
        initial_energy: f64,
        escape_factor: f64,
        cfg: IntegratorConfig,
        p: &SystemParams,
        d: &DriveParams,
    ) -> Result<Self> {
        Ok(Self {
            state,
            dtau: cfg.dtau_for_energy(initial_energy, p)?,
            x_escape: escape_factor * turning_points_1d(initial_energy, p)?.a,
            cfg,
            params: *p,
            drive: *d,
        })
    }

    /// `Ok(false)` on escape.
    pub fn advance_to(&mut self, t: f64) -> Result<bool> {
        match advance_to_time(
            &self.state,
            t,
            self.dtau,
            self.x_escape,
            &self.cfg,
            &self.params,
            &self.drive,
        )? {
            Advance::Reached(s) => {
                self.state = s;
                if self.cfg.adapt_per_section {
                    if let Some(e) = self.unperturbed_energy() {
                        if let Ok(h) = self.cfg.dtau_for_energy(e, &self.params) {
                            self.dtau = h;
                        }
                    }
                }
                Ok(true)
            }
            Advance::Escaped(s) => {
                self.state = s;
                Ok(false)
            }
        }
    }

    pub fn unperturbed_energy(&self) -> Option<f64> {
        let s = self.state.to_phase().ok()?;
        unperturbed_energy(&s, &self.params).ok().filter(|e| e.is_finite())
    }
}

fn section_point(id: usize, m: usize, s: &RegularizedState, chart: &ActionAngleChart) -> SectionPoint {
    let p = chart.params();
    let (x, mom) = match s.to_phase() {
        Ok(ph) => (ph.x, ph.p),
        Err(_) => (0.0, f64::INFINITY),
    };
    let (mut n, mut theta) = (None, None);
    if x > 0.0 {
        if let Ok(e) = unperturbed_energy(&PhaseState { x, p: mom, t: s.t }, p) {
            let (lo, hi) = chart.energy_range();
            if e >= lo && e <= hi {
                n = chart.action(e).ok();
                let branch = if mom >= 0.0 { Branch::Outgoing } else { Branch::Incoming };
                let a = turning_points_1d(e, p).map(|t| t.a).unwrap_or(x);
                theta = angle_of_x(x.min(a), e, branch, p).ok();
            }
        }
    } else {
        theta = Some(0.0);
        n = chart.action(-s.p_t).ok();
    }
    SectionPoint {
        trajectory_id: id,
        m,
        t: s.t,
        x,
        p: mom,
        n,
        theta,
    }
}

fn run_one(
    id: usize,
    ic: &InitialCondition,
    cfg: &SectionConfig,
    chart: &ActionAngleChart,
    d: &DriveParams,
) -> Result<Trajectory> {
    let p = chart.params();
    let e0 = chart.energy(ic.n)?;
    let s0 = state_from_action_angle(ic, cfg.t0, chart, d)?;
    let mut prop = Propagator::new(s0, e0, cfg.escape_factor, cfg.integrator, p, d)?;
    let mut points = Vec::with_capacity(cfg.n_periods + 1);
    points.push(section_point(id, 0, &prop.state, chart));
    let mut tag = TrajectoryTag::Completed;
    for m in 1..=cfg.n_periods {
        match prop.advance_to(cfg.t0 + m as f64 * d.period()) {
            Ok(true) => points.push(section_point(id, m, &prop.state, chart)),
            Ok(false) => {
                tag = TrajectoryTag::Escaped;
                break;
            }
            Err(e) => {
                log::warn!("trajectory {id} stopped at m = {m}: {e}");
                tag = TrajectoryTag::StepFailure;
                break;
            }
        }
    }
    Ok(Trajectory {
        id,
        tag,
        initial: *ic,
        points,
    })
}

/// Stroboscopic sections for every initial condition, in parallel; output
/// is ordered by trajectory id (the index in `initials`).
pub fn stroboscopic_section(
    initials: &[InitialCondition],
    cfg: &SectionConfig,
    chart: &ActionAngleChart,
    d: &DriveParams,
) -> Result<Vec<Trajectory>> {
    d.validate()?;
    let (n_lo, n_hi) = chart.action_range();
    if let Some(bad) = initials.iter().find(|ic| !(ic.n >= n_lo && ic.n <= n_hi)) {
        return Err(Error::OutOfRange {
            quantity: "initial action",
            value: bad.n,
            min: n_lo,
            max: n_hi,
        });
    }
    initials
        .par_iter()
        .enumerate()
        .map(|(id, ic)| run_one(id, ic, cfg, chart, d))
        .collect()
}

/// CSV with columns `trajectory_id, m, t, x, p, n, theta, tag`.
pub fn write_section_csv<W: std::io::Write>(trajectories: &[Trajectory], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["trajectory_id", "m", "t", "x", "p", "n", "theta", "tag"])?;
    let opt = |v: Option<f64>| v.map(|v| format!("{v:?}")).unwrap_or_default();
    for tr in trajectories {
        for pt in &tr.points {
            wr.write_record([
                pt.trajectory_id.to_string(),
                pt.m.to_string(),
                format!("{:?}", pt.t),
                format!("{:?}", pt.x),
                format!("{:?}", pt.p),
                opt(pt.n),
                opt(pt.theta),
                tr.tag.as_str().to_owned(),
            ])?;
        }
    }
    wr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action_angle::energy_of_action;
    use approx::assert_relative_eq;

    fn setup() -> (ActionAngleChart, f64) {
        let p = SystemParams::new(0.15, 0.4).unwrap();
        let chart = ActionAngleChart::from_action_range(&p, 0.2, 5.0, 256).unwrap();
        let w = chart.omega0_at_action(1.0).unwrap();
        (chart, w)
    }

    #[test]
    fn grid_layout() {
        let g = initial_grid(2.0, &DEFAULT_CIRCLE_FACTORS, DEFAULT_THETAS_PER_CIRCLE);
        assert_eq!(g.len(), 100);
        assert_relative_eq!(g[0].n, 1.6);
        assert_relative_eq!(g[99].n, 2.4);
        assert_relative_eq!(g[21].theta, TAU / 20.0);
    }

    #[test]
    fn phase_point_inverts_angle() {
        let p = SystemParams::new(0.15, 0.4).unwrap();
        let e = energy_of_action(1.0, &p).unwrap();
        for theta in [0.3, 1.0, PI, 4.0, 6.0] {
            let (x, mom) = phase_point(e, theta, &p).unwrap();
            let branch = if mom >= 0.0 { Branch::Outgoing } else { Branch::Incoming };
            let back = angle_of_x(x, e, branch, &p).unwrap();
            assert!((back - theta).abs() < 1e-9, "θ = {theta}: {back}");
            assert_relative_eq!(0.5 * mom * mom + potential_1d(x, &p).unwrap(), e, max_relative = 1e-12);
        }
        assert_eq!(phase_point(e, 0.0, &p).unwrap().0, 0.0);
    }

    #[test]
    fn unperturbed_sections_stay_on_circles() {
        let (chart, w) = setup();
        let d = DriveParams::new(0.0, w).unwrap();
        let cfg = SectionConfig {
            n_periods: 20,
            ..Default::default()
        };
        let ics = initial_grid(1.0, &[0.9, 1.1], 4);
        let trs = stroboscopic_section(&ics, &cfg, &chart, &d).unwrap();
        assert_eq!(trs.len(), 8);
        for tr in &trs {
            assert_eq!(tr.tag, TrajectoryTag::Completed);
            assert_eq!(tr.points.len(), 21);
            for pt in &tr.points {
                assert!((pt.n.unwrap() - tr.initial.n).abs() <= 1e-8 * tr.initial.n);
                assert!((pt.t - pt.m as f64 * d.period()).abs() <= 1e-9 * d.period());
            }
        }
        // θ advances by ω₀T per period
        let tr = &trs[1];
        let w0 = chart.omega0_at_action(tr.initial.n).unwrap();
        let dtheta = (tr.points[1].theta.unwrap() - tr.points[0].theta.unwrap()).rem_euclid(TAU);
        assert!((dtheta - (w0 * d.period()).rem_euclid(TAU)).abs() < 1e-7);
    }

    #[test]
    fn rejects_initials_off_chart() {
        let (chart, w) = setup();
        let d = DriveParams::new(0.0, w).unwrap();
        let ics = [InitialCondition { n: 50.0, theta: 0.0 }];
        assert!(stroboscopic_section(&ics, &SectionConfig::default(), &chart, &d).is_err());
    }

    #[test]
    fn csv_columns() {
        let (chart, w) = setup();
        let d = DriveParams::new(0.01, w).unwrap();
        let cfg = SectionConfig {
            n_periods: 3,
            ..Default::default()
        };
        let trs = stroboscopic_section(&initial_grid(1.0, &[1.0], 2), &cfg, &chart, &d).unwrap();
        let mut buf = Vec::new();
        write_section_csv(&trs, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("trajectory_id,m,t,x,p,n,theta,tag\n"));
        assert_eq!(text.lines().count(), 1 + 2 * 4);
    }
}
