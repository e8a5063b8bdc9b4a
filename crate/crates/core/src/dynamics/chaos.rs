//! Action diffusion, two-trajectory chaos classification and the maximal
//! Lyapunov exponent.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::action_angle::ActionAngleChart;
use crate::error::{Error, Result};
use crate::potential::{turning_points_1d, DriveParams};

use super::integrator::{IntegratorConfig, RegularizedState};
use super::section::{state_from_action_angle, InitialCondition, Propagator, SectionPoint, DEFAULT_ESCAPE_FACTOR};

/// Minimum number of section points accepted by [`action_diffusion`].
pub const MIN_DIFFUSION_POINTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffusionRow {
    pub m: usize,
    /// Ensemble variance of `n(m) − n(0)`.
    pub variance: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffusionFit {
    pub table: Vec<DiffusionRow>,
    /// Growth of the variance per drive period.
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub slope_ci95: (f64, f64),
}

/// Two-sided 97.5% Student-t quantile (Cornish–Fisher expansion about 1.96).
fn t975(df: f64) -> f64 {
    let z: f64 = 1.959_963_984_540_054;
    let z3 = z.powi(3);
    let z5 = z.powi(5);
    let z7 = z.powi(7);
    z + (z3 + z) / (4.0 * df)
        + (5.0 * z5 + 16.0 * z3 + 3.0 * z) / (96.0 * df * df)
        + (3.0 * z7 + 19.0 * z5 + 17.0 * z3 - 15.0 * z) / (384.0 * df.powi(3))
}

/// Least-squares line `y = intercept + slope·x` with the slope's standard error.
pub(crate) fn linear_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    let n = x.len();
    if n < 3 {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let stderr = (rss / (nf - 2.0) / sxx).sqrt();
    Some((slope, intercept, stderr))
}

/// Variance of the action displacement against the stroboscopic index, with a
/// fitted linear growth rate. Points without an action are ignored.
pub fn action_diffusion(points: &[SectionPoint]) -> Result<DiffusionFit> {
    let usable: Vec<&SectionPoint> = points.iter().filter(|p| p.n.is_some()).collect();
    if usable.len() < MIN_DIFFUSION_POINTS {
        return Err(Error::InsufficientData {
            needed: MIN_DIFFUSION_POINTS,
            got: usable.len(),
        });
    }
    let mut start: BTreeMap<usize, f64> = BTreeMap::new();
    for p in usable.iter().filter(|p| p.m == 0) {
        start.insert(p.trajectory_id, p.n.unwrap_or(f64::NAN));
    }
    let mut by_m: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for p in &usable {
        if let (Some(n0), Some(n)) = (start.get(&p.trajectory_id), p.n) {
            by_m.entry(p.m).or_default().push(n - n0);
        }
    }
    let table: Vec<DiffusionRow> = by_m
        .into_iter()
        .filter(|(_, v)| v.len() >= 2)
        .map(|(m, mut v)| {
            // sorted so the sum does not depend on trajectory order
            v.sort_by(f64::total_cmp);
            let k = v.len() as f64;
            let mean = v.iter().sum::<f64>() / k;
            let var = v.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (k - 1.0);
            DiffusionRow {
                m,
                variance: var,
                count: v.len(),
            }
        })
        .collect();
    let xs: Vec<f64> = table.iter().map(|r| r.m as f64).collect();
    let ys: Vec<f64> = table.iter().map(|r| r.variance).collect();
    let (slope, intercept, stderr) = linear_fit(&xs, &ys).ok_or(Error::InsufficientData {
        needed: 3,
        got: table.len(),
    })?;
    let half = t975(xs.len() as f64 - 2.0) * stderr;
    Ok(DiffusionFit {
        table,
        slope,
        intercept,
        slope_stderr: stderr,
        slope_ci95: (slope - half, slope + half),
    })
}

/// Settings of the two-trajectory divergence proxy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChaosConfig {
    pub n_periods: usize,
    /// Initial separation in scaled units.
    pub shadow_offset: f64,
    /// Direction of the initial offset in the `(δn/n, δθ)` plane.
    pub offset_angle: f64,
    /// Separation growth per drive period above which a trajectory is chaotic.
    pub threshold: f64,
    /// Count trajectories that leave `escape_factor·a(E₀)` as chaotic.
    pub escape_is_chaotic: bool,
    pub escape_factor: f64,
    pub integrator: IntegratorConfig,
}

/// Separation growth per drive period that splits the regular and chaotic
/// calibration ensembles.
pub const DEFAULT_CHAOS_THRESHOLD: f64 = 0.1;
/// Integration resolution used for chaos diagnostics.
pub const CHAOS_STEPS_PER_ORBIT: usize = 256;

impl Default for ChaosConfig {
    fn default() -> Self {
        Self {
            n_periods: super::section::DEFAULT_PERIODS,
            shadow_offset: 1e-8,
            offset_angle: 0.0,
            threshold: DEFAULT_CHAOS_THRESHOLD,
            escape_is_chaotic: true,
            escape_factor: DEFAULT_ESCAPE_FACTOR,
            integrator: IntegratorConfig {
                steps_per_orbit: CHAOS_STEPS_PER_ORBIT,
                ..IntegratorConfig::default()
            },
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Scales {
    u: f64,
    pu: f64,
    p_t: f64,
}

impl Scales {
    fn delta(&self, a: &RegularizedState, b: &RegularizedState) -> [f64; 3] {
        [
            (b.u - a.u) / self.u,
            (b.pu - a.pu) / self.pu,
            (b.p_t - a.p_t) / self.p_t,
        ]
    }
}

fn norm(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Per-period log growth of a renormalized shadow separation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceRun {
    /// `ln(d_m / d_{m−1}′)`, where `d′` is the separation after renormalization.
    pub increments: Vec<f64>,
    pub escaped: bool,
    pub failed: bool,
}

/// Runs a trajectory and its shadow for `cfg.n_periods` drive periods.
pub fn divergence_run(
    ic: &InitialCondition,
    cfg: &ChaosConfig,
    chart: &ActionAngleChart,
    d: &DriveParams,
) -> Result<DivergenceRun> {
    let p = chart.params();
    let e0 = chart.energy(ic.n)?;
    let a0 = turning_points_1d(e0, p)?.a;
    let scales = Scales {
        u: a0.sqrt(),
        pu: (8.0 * (p.z + e0.abs() * a0 + p.lambda * a0 * a0)).sqrt(),
        p_t: p.lambda * a0 + p.z / a0,
    };
    let shadow_ic = InitialCondition {
        n: ic.n * (1.0 + cfg.shadow_offset * cfg.offset_angle.cos()),
        theta: ic.theta + cfg.shadow_offset * cfg.offset_angle.sin(),
    };
    let s0 = state_from_action_angle(ic, 0.0, chart, d)?;
    let s1 = state_from_action_angle(&shadow_ic, 0.0, chart, d)?;
    let mut main = Propagator::new(s0, e0, cfg.escape_factor, cfg.integrator, p, d)?;
    let mut shadow = Propagator::new(s1, e0, cfg.escape_factor, cfg.integrator, p, d)?;
    let mut reference = norm(&scales.delta(&s0, &s1));
    if !(reference > 0.0) {
        return Err(Error::domain("divergence_run", "shadow coincides with the trajectory"));
    }
    let d0 = cfg.shadow_offset;
    let mut run = DivergenceRun {
        increments: Vec::with_capacity(cfg.n_periods),
        escaped: false,
        failed: false,
    };
    for m in 1..=cfg.n_periods {
        let t = m as f64 * d.period();
        match (main.advance_to(t), shadow.advance_to(t)) {
            (Ok(true), Ok(true)) => {}
            (Ok(_), Ok(_)) => {
                run.escaped = true;
                break;
            }
            _ => {
                run.failed = true;
                break;
            }
        }
        let delta = scales.delta(&main.state, &shadow.state);
        let dist = norm(&delta);
        if !(dist.is_finite() && dist > 0.0) {
            run.failed = true;
            break;
        }
        run.increments.push((dist / reference).ln());
        // rescaling a tangent separation keeps K = 0 to second order
        let f = d0 / dist;
        let base = main.state;
        shadow.state.u = base.u + f * delta[0] * scales.u;
        shadow.state.pu = base.pu + f * delta[1] * scales.pu;
        shadow.state.p_t = base.p_t + f * delta[2] * scales.p_t;
        shadow.state.t = base.t;
        reference = d0;
    }
    Ok(run)
}

/// Maximal Lyapunov exponent per unit time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovEstimate {
    pub exponent: f64,
    pub uncertainty: f64,
    /// Drive periods `[start, end)` used for the estimate.
    pub fit_window: (usize, usize),
    /// The trajectory escaped or failed before the requested time.
    pub partial: bool,
}

const LYAPUNOV_BLOCKS: usize = 10;

fn estimate_from_increments(inc: &[f64], period: f64, partial: bool) -> Result<LyapunovEstimate> {
    let start = inc.len() / 2;
    let window = &inc[start..];
    if window.len() < LYAPUNOV_BLOCKS {
        return Err(Error::InsufficientData {
            needed: 2 * LYAPUNOV_BLOCKS,
            got: inc.len(),
        });
    }
    let mean = window.iter().sum::<f64>() / window.len() as f64;
    let size = window.len() / LYAPUNOV_BLOCKS;
    let blocks: Vec<f64> = window
        .chunks(size)
        .take(LYAPUNOV_BLOCKS)
        .map(|c| c.iter().sum::<f64>() / c.len() as f64)
        .collect();
    let bm = blocks.iter().sum::<f64>() / blocks.len() as f64;
    let var = blocks.iter().map(|b| (b - bm).powi(2)).sum::<f64>() / (blocks.len() as f64 - 1.0);
    Ok(LyapunovEstimate {
        exponent: mean / period,
        uncertainty: (var / blocks.len() as f64).sqrt() / period,
        fit_window: (start, inc.len()),
        partial,
    })
}

/// Maximal Lyapunov exponent from periodic renormalization of a shadow
/// trajectory over `n_periods` drive periods; the second half of the run is
/// the fit window.
pub fn lyapunov_mle(
    ic: &InitialCondition,
    n_periods: usize,
    cfg: &ChaosConfig,
    chart: &ActionAngleChart,
    d: &DriveParams,
) -> Result<LyapunovEstimate> {
    let run = divergence_run(ic, &ChaosConfig { n_periods, ..*cfg }, chart, d)?;
    let partial = run.escaped || run.failed;
    estimate_from_increments(&run.increments, d.period(), partial)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Regular,
    Chaotic,
    Escaped,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChaosReport {
    /// Chaotic share of the trajectories that did not fail.
    pub fraction: f64,
    pub classes: Vec<Classification>,
    /// Mean log growth per drive period over the second half of each run.
    pub growth_rates: Vec<Option<f64>>,
    pub config: ChaosConfig,
}

/// Growth per drive period of a run; escaped runs use what they have.
fn growth_rate(run: &DivergenceRun) -> Option<f64> {
    let w = &run.increments[run.increments.len() / 2..];
    (!w.is_empty()).then(|| w.iter().sum::<f64>() / w.len() as f64)
}

/// Fraction of `initials` classified chaotic by the divergence proxy.
pub fn chaotic_fraction(
    initials: &[InitialCondition],
    cfg: &ChaosConfig,
    chart: &ActionAngleChart,
    d: &DriveParams,
) -> Result<ChaosReport> {
    d.validate()?;
    let runs: Vec<Result<DivergenceRun>> = initials
        .par_iter()
        .map(|ic| divergence_run(ic, cfg, chart, d))
        .collect();
    let mut classes = Vec::with_capacity(runs.len());
    let mut rates = Vec::with_capacity(runs.len());
    for r in runs {
        let run = r?;
        let rate = growth_rate(&run);
        let class = if run.failed {
            Classification::Failed
        } else if run.escaped {
            Classification::Escaped
        } else if rate.is_some_and(|g| g > cfg.threshold) {
            Classification::Chaotic
        } else {
            Classification::Regular
        };
        classes.push(class);
        rates.push(rate);
    }
    let usable = classes.iter().filter(|c| **c != Classification::Failed).count();
    let chaotic = classes
        .iter()
        .filter(|c| **c == Classification::Chaotic || (cfg.escape_is_chaotic && **c == Classification::Escaped))
        .count();
    let fraction = if usable == 0 {
        0.0
    } else {
        chaotic as f64 / usable as f64
    };
    Ok(ChaosReport {
        fraction,
        classes,
        growth_rates: rates,
        config: *cfg,
    })
}
