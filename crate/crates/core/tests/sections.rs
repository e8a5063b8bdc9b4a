//! Driven sections, diffusion and chaos diagnostics on calibrated ensembles.
//!
//! All runs use the small-a quarkonium panel: (Z, λ) = (0.15, 0.4), orbits
//! around n = 0.05, drive at the primary resonance ω = ω₀(0.05), with the
//! field measured in units of the numeric overlap estimate ε_cr ≈ 122.7.

use quarkonium_core::action_angle::ActionAngleChart;
use quarkonium_core::chirikov::epsilon_cr_numeric;
use quarkonium_core::dynamics::section::DEFAULT_CIRCLE_FACTORS;
use quarkonium_core::dynamics::{
    action_diffusion, chaotic_fraction, initial_grid, lyapunov_mle, stroboscopic_section, ChaosConfig,
    InitialCondition, IntegratorConfig, SectionConfig, Trajectory, TrajectoryTag,
};
use quarkonium_core::{ChirikovConfig, DriveParams, SectionPoint, SystemParams};

const N_RES: f64 = 0.05;

struct Panel {
    chart: ActionAngleChart,
    omega: f64,
    eps_cr: f64,
}

fn panel() -> Panel {
    panel_up_to(20.0 * N_RES)
}

fn panel_up_to(n_max: f64) -> Panel {
    let p = SystemParams::new(0.15, 0.4).unwrap();
    let chart = ActionAngleChart::from_action_range(&p, 0.2 * N_RES, n_max, 256).unwrap();
    let omega = chart.omega0_at_action(N_RES).unwrap();
    let eps_cr = epsilon_cr_numeric(N_RES, omega, &chart, &ChirikovConfig::default())
        .unwrap()
        .epsilon_cr;
    Panel { chart, omega, eps_cr }
}

fn section_config(n_periods: usize) -> SectionConfig {
    SectionConfig {
        n_periods,
        integrator: IntegratorConfig {
            steps_per_orbit: 256,
            ..IntegratorConfig::default()
        },
        ..SectionConfig::default()
    }
}

fn run_on(pn: &Panel, ratio: f64, cfg: &SectionConfig) -> Vec<Trajectory> {
    let ics = initial_grid(N_RES, &DEFAULT_CIRCLE_FACTORS, 8);
    let d = DriveParams::new(ratio * pn.eps_cr, pn.omega).unwrap();
    stroboscopic_section(&ics, cfg, &pn.chart, &d).unwrap()
}

fn run(ratio: f64, n_periods: usize) -> Vec<Trajectory> {
    run_on(&panel(), ratio, &section_config(n_periods))
}

fn max_relative_spread(t: &Trajectory) -> f64 {
    let n0 = t.initial.n;
    t.points
        .iter()
        .filter_map(|q| q.n)
        .map(|n| ((n - n0) / n0).abs())
        .fold(0.0, f64::max)
}

fn variance(v: &[f64]) -> f64 {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64
}

// variance of the on-chart action prefix against the variance of its first two points
fn variance_growth(t: &Trajectory) -> Option<f64> {
    let ns: Vec<f64> = t.points.iter().map_while(|q| q.n).collect();
    if ns.len() < 3 {
        return None;
    }
    let early = variance(&ns[..2]);
    (early > 0.0).then(|| variance(&ns) / early)
}

#[test]
fn numeric_critical_field_is_frozen() {
    let pn = panel();
    assert!((pn.eps_cr - 122.67).abs() < 0.05, "{}", pn.eps_cr);
}

#[test]
fn undriven_sections_lie_on_invariant_circles() {
    let cfg = SectionConfig {
        n_periods: 200,
        ..SectionConfig::default()
    };
    let pn = panel();
    for t in run_on(&pn, 0.0, &cfg) {
        assert_eq!(t.tag, TrajectoryTag::Completed);
        assert!(max_relative_spread(&t) < 1e-7, "{}", max_relative_spread(&t));
        // reading n off (x, p) amplifies the step error by 1/x next to the wall
        let a = pn.chart.turning_point(t.initial.n).unwrap();
        let n0 = t.initial.n;
        for q in t.points.iter().filter(|q| q.x >= 0.1 * a) {
            let dn = (q.n.unwrap() / n0 - 1.0).abs();
            assert!(dn < 1e-8, "m = {}: {dn}", q.m);
        }
    }
}

#[test]
fn weak_drive_spread_is_bounded() {
    // calibration over 500 periods: max 3.0e-2 at 0.01·ε_cr, 5.5e-2 at 0.03·ε_cr
    let trajectories = run(0.01, 500);
    assert!(trajectories.iter().all(|t| t.tag == TrajectoryTag::Completed));
    let worst = trajectories.iter().map(max_relative_spread).fold(0.0, f64::max);
    assert!(worst < 0.06, "{worst}");
}

#[test]
#[ignore = "at 0.1·ε_cr the primary resonance is already chaotic: max spread 15.2, 4/40 escape"]
fn tenth_of_critical_field_spread_is_bounded() {
    let trajectories = run(0.1, 500);
    assert!(trajectories.iter().all(|t| t.tag == TrajectoryTag::Completed));
    let worst = trajectories.iter().map(max_relative_spread).fold(0.0, f64::max);
    assert!(worst < 0.06, "{worst}");
}

#[test]
fn strong_drive_grows_action_variance() {
    // most orbits leave within a few periods, so the chart must reach far above the start
    let trajectories = run_on(&panel_up_to(400.0 * N_RES), 10.0, &section_config(500));
    let best = trajectories.iter().filter_map(variance_growth).fold(0.0, f64::max);
    assert!(best > 10.0, "{best}");
}

#[test]
fn undriven_diffusion_slope_vanishes() {
    let points: Vec<SectionPoint> = run(0.0, 200).into_iter().flat_map(|t| t.points).collect();
    let fit = action_diffusion(&points).unwrap();
    assert!(fit.slope.abs() < 1e-10, "{}", fit.slope);
}

#[test]
fn chaotic_diffusion_slope_is_positive() {
    let points: Vec<SectionPoint> = run(0.1, 500).into_iter().flat_map(|t| t.points).collect();
    let fit = action_diffusion(&points).unwrap();
    assert!(fit.slope > 0.0 && fit.slope_ci95.0 > 0.0, "{fit:?}");
}

fn chaotic_orbit() -> InitialCondition {
    InitialCondition {
        n: 1.2 * N_RES,
        theta: 0.75 * std::f64::consts::PI,
    }
}

#[test]
fn lyapunov_exponent_is_significant_in_chaos() {
    let pn = panel();
    let d = DriveParams::new(0.1 * pn.eps_cr, pn.omega).unwrap();
    let est = lyapunov_mle(&chaotic_orbit(), 500, &ChaosConfig::default(), &pn.chart, &d).unwrap();
    assert!(!est.partial);
    assert!(est.exponent > 3.0 * est.uncertainty, "{est:?}");
}

#[test]
fn lyapunov_exponent_ignores_offset_direction() {
    let pn = panel();
    let d = DriveParams::new(0.1 * pn.eps_cr, pn.omega).unwrap();
    let at = |angle: f64| {
        let cfg = ChaosConfig {
            offset_angle: angle,
            ..ChaosConfig::default()
        };
        lyapunov_mle(&chaotic_orbit(), 500, &cfg, &pn.chart, &d)
            .unwrap()
            .exponent
    };
    let reference = at(0.0);
    for angle in [1.0, 2.0, 4.0] {
        let l = at(angle);
        assert!((l / reference - 1.0).abs() < 0.1, "{angle}: {l} vs {reference}");
    }
}

#[test]
fn lyapunov_exponent_vanishes_without_drive() {
    let pn = panel();
    let d = DriveParams::new(0.0, pn.omega).unwrap();
    let ic = InitialCondition { n: N_RES, theta: 1.0 };
    let short = lyapunov_mle(&ic, 100, &ChaosConfig::default(), &pn.chart, &d).unwrap();
    let long = lyapunov_mle(&ic, 400, &ChaosConfig::default(), &pn.chart, &d).unwrap();
    // linear separation growth gives an exponent ~ ln(T)/T
    assert!(long.exponent.abs() < short.exponent.abs().max(1e-3));
    assert!(long.exponent.abs() * 400.0 * d.period() < 10.0);
}

#[test]
fn chaotic_fraction_rises_with_field() {
    let p = SystemParams::hydrogen(0.15).unwrap();
    let chart = ActionAngleChart::from_action_range(&p, 0.2 * N_RES, 5.0 * N_RES, 256).unwrap();
    let omega = chart.omega0_at_action(N_RES).unwrap();
    let ics = initial_grid(N_RES, &DEFAULT_CIRCLE_FACTORS, 20);
    let mut last = 0.0;
    // scaled fields ε n⁴/Z³ of the calibration ladder
    for scaled in [0.01, 0.02, 0.03, 0.05, 0.08] {
        let eps = scaled * p.z.powi(3) / N_RES.powi(4);
        let d = DriveParams::new(eps, omega).unwrap();
        let f = chaotic_fraction(&ics, &ChaosConfig::default(), &chart, &d)
            .unwrap()
            .fraction;
        assert!(f >= last - 0.02, "{scaled}: {f} after {last}");
        last = f;
    }
    assert!(last > 0.5);
}
