//! Regularized integration of `H = p²/2 − Z/x + λx + εx cos(ωt + φ₀)`.
//!
//! With `x = u²`, `p = p_u/(2u)` and `dt = x dτ`, the extended Hamiltonian
//! `K = x(H + p_t)` becomes
//!
//! `K = p_u²/8 − Z + u² p_t + u⁴(λ + ε cos(ωt + φ₀))`,
//!
//! regular at `u = 0` and zero along physical motion. `K` splits into a free
//! part `p_u²/8` and a part that does not depend on `p_u`; both flows are
//! solved exactly, so every scheme below is symplectic and time-reversible.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{potential_1d, potential_slope_1d, turning_points_1d, DriveParams, SystemParams};
use crate::quadrature::FixedRule;

/// Physical state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub x: f64,
    pub p: f64,
    pub t: f64,
}

/// Regularized state. `p_t` is the momentum conjugate to `t`, equal to
/// minus the full (driven) energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularizedState {
    pub u: f64,
    pub pu: f64,
    pub t: f64,
    pub tau: f64,
    pub p_t: f64,
}

fn phase(t: f64, d: &DriveParams) -> f64 {
    d.omega * t + d.phase
}

/// Full energy `p²/2 + V(x) + εx cos(ωt + φ₀)`.
pub fn driven_energy(s: &PhaseState, p: &SystemParams, d: &DriveParams) -> Result<f64> {
    Ok(0.5 * s.p * s.p + potential_1d(s.x, p)? + d.epsilon * s.x * phase(s.t, d).cos())
}

/// Unperturbed energy `p²/2 + V(x)`.
pub fn unperturbed_energy(s: &PhaseState, p: &SystemParams) -> Result<f64> {
    Ok(0.5 * s.p * s.p + potential_1d(s.x, p)?)
}

/// `(ẋ, ṗ)` with `ṗ = −dV/dx − ε cos(ωt + φ₀)`.
pub fn derivatives(s: &PhaseState, p: &SystemParams, d: &DriveParams) -> Result<(f64, f64)> {
    let force = -potential_slope_1d(s.x, p)? - d.epsilon * phase(s.t, d).cos();
    Ok((s.p, force))
}

impl RegularizedState {
    pub fn from_phase(s: &PhaseState, p: &SystemParams, d: &DriveParams) -> Result<Self> {
        if !(s.x > 0.0 && s.x.is_finite()) {
            return Err(Error::domain(
                "RegularizedState::from_phase",
                format!("x = {:?} must be > 0", s.x),
            ));
        }
        let u = s.x.sqrt();
        Ok(Self {
            u,
            pu: 2.0 * u * s.p,
            t: s.t,
            tau: 0.0,
            p_t: -driven_energy(s, p, d)?,
        })
    }

    /// State at the wall, moving outward with full energy `energy`.
    pub fn at_wall(energy: f64, t: f64, p: &SystemParams) -> Self {
        Self {
            u: 0.0,
            pu: (8.0 * p.z).sqrt(),
            t,
            tau: 0.0,
            p_t: -energy,
        }
    }

    pub fn x(&self) -> f64 {
        self.u * self.u
    }

    /// Physical state; undefined exactly at the wall.
    pub fn to_phase(&self) -> Result<PhaseState> {
        if self.u == 0.0 {
            return Err(Error::domain(
                "RegularizedState::to_phase",
                "momentum is infinite at x = 0",
            ));
        }
        Ok(PhaseState {
            x: self.x(),
            p: self.pu / (2.0 * self.u),
            t: self.t,
        })
    }

    /// The extended Hamiltonian, zero along physical motion.
    pub fn k_hamiltonian(&self, p: &SystemParams, d: &DriveParams) -> f64 {
        let u2 = self.u * self.u;
        self.pu * self.pu / 8.0 - p.z + u2 * self.p_t + u2 * u2 * (p.lambda + d.epsilon * phase(self.t, d).cos())
    }

    fn is_finite(&self) -> bool {
        self.u.is_finite() && self.pu.is_finite() && self.t.is_finite() && self.p_t.is_finite()
    }
}

/// `sin(y)/y`.
fn sinc(y: f64) -> f64 {
    if y.abs() < 1e-4 {
        1.0 - y * y / 6.0
    } else {
        y.sin() / y
    }
}

fn drift(s: &mut RegularizedState, h: f64) {
    s.u += 0.25 * s.pu * h;
    s.tau += h;
}

fn kick(s: &mut RegularizedState, h: f64, p: &SystemParams, d: &DriveParams) {
    let u = s.u;
    let u2 = u * u;
    let psi0 = phase(s.t, d);
    let delta = d.omega * u2 * h;
    // ∫₀^h cos ψ(σ) dσ with ψ advancing at ωu²
    let int_cos = h * (psi0 + 0.5 * delta).cos() * sinc(0.5 * delta);
    let cos0 = psi0.cos();
    s.pu -= 2.0 * u * h * (s.p_t + u2 * (d.epsilon * cos0 + 2.0 * p.lambda)) + 2.0 * u * u2 * d.epsilon * int_cos;
    // cos ψ0 − cos ψ1 = 2 sin(ψ0 + δ/2) sin(δ/2)
    s.p_t += u2 * d.epsilon * 2.0 * (psi0 + 0.5 * delta).sin() * (0.5 * delta).sin();
    s.t += u2 * h;
}

fn strang(s: &mut RegularizedState, h: f64, p: &SystemParams, d: &DriveParams) {
    drift(s, 0.5 * h);
    kick(s, h, p, d);
    drift(s, 0.5 * h);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Second order: drift/kick/drift.
    Strang,
    /// Fourth-order triple-jump composition of `Strang`.
    #[default]
    Yoshida4,
}

impl Scheme {
    pub fn order(self) -> u32 {
        match self {
            Scheme::Strang => 2,
            Scheme::Yoshida4 => 4,
        }
    }
}

/// One Strang step of fictitious length `dtau` (negative steps run backward).
pub fn step_regularized(
    s: &RegularizedState,
    dtau: f64,
    p: &SystemParams,
    d: &DriveParams,
) -> Result<RegularizedState> {
    step_with(s, dtau, Scheme::Strang, p, d)
}

pub fn step_with(
    s: &RegularizedState,
    dtau: f64,
    scheme: Scheme,
    p: &SystemParams,
    d: &DriveParams,
) -> Result<RegularizedState> {
    let mut out = *s;
    match scheme {
        Scheme::Strang => strang(&mut out, dtau, p, d),
        Scheme::Yoshida4 => {
            let cbrt2 = 2f64.cbrt();
            let w1 = 1.0 / (2.0 - cbrt2);
            let w0 = -cbrt2 * w1;
            strang(&mut out, w1 * dtau, p, d);
            strang(&mut out, w0 * dtau, p, d);
            strang(&mut out, w1 * dtau, p, d);
        }
    }
    if !out.is_finite() {
        return Err(Error::StepRejected {
            tau: s.tau,
            suggested_dtau: 0.5 * dtau,
        });
    }
    out.tau = s.tau + dtau;
    Ok(out)
}

/// Fictitious-time period `∮dt/x` of the unperturbed orbit with energy `energy`.
pub fn fictitious_period(energy: f64, p: &SystemParams) -> Result<f64> {
    let a = turning_points_1d(energy, p)?.a;
    // x = a sin²φ gives dτ = 2 dφ/√(2(λx + Z/a))
    let rule = FixedRule::new(32);
    Ok(rule.integrate(
        |f| 2.0 / (2.0 * (p.lambda * a * f.sin().powi(2) + p.z / a)).sqrt(),
        0.0,
        PI,
    ))
}

/// Steps per unperturbed orbit giving ≤ 1e−9 relative energy drift over 10⁴ orbits.
pub const DEFAULT_STEPS_PER_ORBIT: usize = 2048;

/// Fixed-step integrator in fictitious time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub scheme: Scheme,
    pub steps_per_orbit: usize,
    /// Re-derive `dτ` from the current unperturbed energy at each section.
    pub adapt_per_section: bool,
    /// Upper bound on steps between two sections before giving up.
    pub max_steps_per_section: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::Yoshida4,
            steps_per_orbit: DEFAULT_STEPS_PER_ORBIT,
            adapt_per_section: true,
            max_steps_per_section: 10_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn dtau_for_energy(&self, energy: f64, p: &SystemParams) -> Result<f64> {
        Ok(fictitious_period(energy, p)? / self.steps_per_orbit as f64)
    }
}

/// Why [`advance_to_time`] stopped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Advance {
    Reached(RegularizedState),
    Escaped(RegularizedState),
}

/// Steps until `t = t_target` exactly (up to root tolerance), stopping early
/// if `x` exceeds `x_escape`. The crossing step is re-integrated with the
/// step length that lands on `t_target`.
pub fn advance_to_time(
    s: &RegularizedState,
    t_target: f64,
    dtau: f64,
    x_escape: f64,
    cfg: &IntegratorConfig,
    p: &SystemParams,
    d: &DriveParams,
) -> Result<Advance> {
    let mut cur = *s;
    for _ in 0..cfg.max_steps_per_section {
        if cur.t >= t_target {
            return Ok(Advance::Reached(cur));
        }
        let next = step_with(&cur, dtau, cfg.scheme, p, d)?;
        if next.x() > x_escape {
            return Ok(Advance::Escaped(next));
        }
        if next.t >= t_target {
            if next.t == t_target {
                return Ok(Advance::Reached(next));
            }
            let f = |h: f64| {
                step_with(&cur, h, cfg.scheme, p, d)
                    .map(|s| s.t - t_target)
                    .unwrap_or(f64::NAN)
            };
            let h = crate::roots::brent("advance_to_time", f, 0.0, dtau, 1e-15 * dtau)?;
            return Ok(Advance::Reached(step_with(&cur, h, cfg.scheme, p, d)?));
        }
        cur = next;
    }
    Err(Error::StepRejected {
        tau: cur.tau,
        suggested_dtau: dtau,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn quark() -> SystemParams {
        SystemParams::new(0.15, 0.4).unwrap()
    }

    fn free() -> DriveParams {
        DriveParams::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn no_interior_equilibrium() {
        let p = quark();
        let s = PhaseState {
            x: (p.z / p.lambda).sqrt(),
            p: 0.0,
            t: 0.0,
        };
        // Z/x² = λ there, so the force is −2λ: V is monotone on x > 0
        let (_, f) = derivatives(&s, &p, &free()).unwrap();
        assert_relative_eq!(f, -2.0 * p.lambda, max_relative = 1e-14);
    }

    #[test]
    fn force_matches_finite_difference() {
        let p = quark();
        for x in [0.1, 0.7, 3.0] {
            let s = PhaseState { x, p: 0.3, t: 0.0 };
            let (xdot, f) = derivatives(&s, &p, &free()).unwrap();
            let h = 1e-5;
            let fd = -(potential_1d(x + h, &p).unwrap() - potential_1d(x - h, &p).unwrap()) / (2.0 * h);
            assert_relative_eq!(f, fd, max_relative = 1e-7);
            assert_eq!(xdot, 0.3);
        }
        assert!(derivatives(&PhaseState { x: 0.0, p: 0.0, t: 0.0 }, &p, &free()).is_err());
    }

    #[test]
    fn drive_vanishes_at_quarter_period() {
        let p = quark();
        let d = DriveParams::new(0.7, 2.0).unwrap();
        let s = PhaseState {
            x: 1.0,
            p: 0.0,
            t: PI / (2.0 * d.omega),
        };
        let with = derivatives(&s, &p, &d).unwrap().1;
        let without = derivatives(&s, &p, &free()).unwrap().1;
        assert!((with - without).abs() < 1e-15);
    }

    #[test]
    fn transform_round_trip() {
        let p = quark();
        let d = DriveParams::new(0.1, 1.3).unwrap();
        let s = PhaseState {
            x: 0.37,
            p: -1.2,
            t: 4.0,
        };
        let r = RegularizedState::from_phase(&s, &p, &d).unwrap();
        let back = r.to_phase().unwrap();
        assert_relative_eq!(back.x, s.x, max_relative = 1e-12);
        assert_relative_eq!(back.p, s.p, max_relative = 1e-12);
        assert!(r.k_hamiltonian(&p, &d).abs() < 1e-14);
        assert!(RegularizedState::at_wall(-1.0, 0.0, &p).k_hamiltonian(&p, &d).abs() < 1e-15);
    }

    #[test]
    fn kick_flow_matches_fine_quadrature() {
        // the exact kick against many tiny explicit Euler updates of the same flow
        let p = quark();
        let d = DriveParams::new(0.3, 2.5).unwrap();
        let s0 = RegularizedState {
            u: 0.8,
            pu: 0.1,
            t: 0.2,
            tau: 0.0,
            p_t: -0.5,
        };
        let mut exact = s0;
        kick(&mut exact, 0.4, &p, &d);
        let mut e = s0;
        let n = 200_000;
        let h = 0.4 / n as f64;
        for _ in 0..n {
            let u = e.u;
            let psi = d.omega * e.t + d.phase;
            let tm = e.t + 0.5 * u * u * h;
            let psim = d.omega * tm + d.phase;
            let ptm = e.p_t + 0.5 * h * u.powi(4) * d.epsilon * d.omega * psi.sin();
            e.pu -= h * (2.0 * u * ptm + 4.0 * u.powi(3) * (p.lambda + d.epsilon * psim.cos()));
            e.p_t += h * u.powi(4) * d.epsilon * d.omega * psim.sin();
            e.t += u * u * h;
        }
        assert_relative_eq!(exact.pu, e.pu, max_relative = 1e-8);
        assert_relative_eq!(exact.p_t, e.p_t, max_relative = 1e-8);
        assert_relative_eq!(exact.t, e.t, max_relative = 1e-10);
    }

    fn energy_error(steps: usize, scheme: Scheme) -> f64 {
        let p = quark();
        let d = free();
        let e0 = 1.0;
        let a = turning_points_1d(e0, &p).unwrap().a;
        let s0 = RegularizedState::from_phase(
            &PhaseState {
                x: 0.5 * a,
                p: (2.0 * (e0 - potential_1d(0.5 * a, &p).unwrap())).sqrt(),
                t: 0.0,
            },
            &p,
            &d,
        )
        .unwrap();
        let h = fictitious_period(e0, &p).unwrap() / steps as f64;
        let mut s = s0;
        let mut worst = 0.0_f64;
        for _ in 0..steps {
            s = step_with(&s, h, scheme, &p, &d).unwrap();
            if s.x() > 0.25 * a {
                worst = worst.max((unperturbed_energy(&s.to_phase().unwrap(), &p).unwrap() - e0).abs());
            }
        }
        worst
    }

    #[test]
    fn strang_is_second_order() {
        let r = energy_error(64, Scheme::Strang) / energy_error(128, Scheme::Strang);
        assert!((r - 4.0).abs() < 0.4, "ratio {r}");
    }

    #[test]
    fn yoshida_is_fourth_order() {
        let r = energy_error(64, Scheme::Yoshida4) / energy_error(128, Scheme::Yoshida4);
        assert!((r - 16.0).abs() < 2.5, "ratio {r}");
    }

    #[test]
    fn fictitious_period_closes_the_orbit() {
        let p = quark();
        let e0 = 0.4;
        let tp = turning_points_1d(e0, &p).unwrap();
        let mut s = RegularizedState::at_wall(e0, 0.0, &p);
        let n = 4096;
        let h = fictitious_period(e0, &p).unwrap() / n as f64;
        for _ in 0..n {
            s = step_with(&s, h, Scheme::Yoshida4, &p, &free()).unwrap();
        }
        assert!(s.u.abs() < 1e-9 * tp.a.sqrt());
        let period = crate::action_angle::period(e0, &p).unwrap();
        assert_relative_eq!(s.t, period, max_relative = 1e-10);
    }

    #[test]
    fn hydrogen_fictitious_period() {
        let p = SystemParams::hydrogen(1.0).unwrap();
        // a = 2 at E = −1/2: T_τ = 2π/√(2Z/a)
        assert_relative_eq!(fictitious_period(-0.5, &p).unwrap(), 2.0 * PI, max_relative = 1e-14);
    }

    #[test]
    fn reversible_with_drive() {
        let p = quark();
        let d = DriveParams::new(0.2, 1.7).unwrap();
        let s0 = RegularizedState::at_wall(0.8, 0.3, &p);
        let h = 0.01;
        let mut s = s0;
        for _ in 0..5000 {
            s = step_with(&s, h, Scheme::Yoshida4, &p, &d).unwrap();
        }
        for _ in 0..5000 {
            s = step_with(&s, -h, Scheme::Yoshida4, &p, &d).unwrap();
        }
        assert!((s.u - s0.u).abs() < 1e-8);
        assert!((s.pu - s0.pu).abs() < 1e-8);
        assert!((s.t - s0.t).abs() < 1e-8);
        assert!((s.p_t - s0.p_t).abs() < 1e-8);
    }

    #[test]
    fn lands_on_target_time() {
        let p = quark();
        let d = DriveParams::new(0.05, 1.1).unwrap();
        let cfg = IntegratorConfig::default();
        let s0 = RegularizedState::at_wall(0.5, 0.0, &p);
        let dtau = cfg.dtau_for_energy(0.5, &p).unwrap();
        let target = 3.0 * d.period();
        match advance_to_time(&s0, target, dtau, 1e6, &cfg, &p, &d).unwrap() {
            Advance::Reached(s) => assert!((s.t - target).abs() <= 1e-9 * d.period()),
            Advance::Escaped(_) => panic!("escaped"),
        }
        assert!(matches!(
            advance_to_time(&s0, target, dtau, 1e-3, &cfg, &p, &d).unwrap(),
            Advance::Escaped(_)
        ));
    }
}
