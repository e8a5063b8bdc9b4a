//! Fourier amplitudes of the coordinate along an unperturbed orbit.
//!
//! Convention: `x(θ) = x₀ + 2 Σ_{k≥1} x_k cos kθ` with
//! `x_k = (1/2π)∮ x(θ) e^{−ikθ} dθ` and `θ = 0` at the wall. The amplitude
//! with a leading minus sign and no `1/2π` is `−2π x_k`
//! ([`FourierAmplitudes::unnormalized`]).
//!
//! The orbit is parametrized by `x = a sin²φ`, `φ ∈ [0, π)`, which covers the
//! outgoing and returning legs. In `φ` the integrand is analytic and
//! `π`-periodic, so the trapezoidal sum converges geometrically.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::potential::{turning_points_1d, SystemParams};
use crate::quadrature::FixedRule;

use super::exact::{energy_of_action, time_density};

/// Number of `φ` samples per orbit.
pub const DEFAULT_ORBIT_SAMPLES: usize = 4096;
/// Default truncation order.
pub const DEFAULT_K_MAX: usize = 32;
/// `|x_{k_max}| / |x_1|` above which the truncation is flagged.
pub const RESOLUTION_THRESHOLD: f64 = 0.01;

/// Equispaced-in-`φ` samples of one unperturbed period.
#[derive(Debug, Clone)]
pub struct OrbitSamples {
    pub a: f64,
    pub period: f64,
    pub phi: Vec<f64>,
    pub x: Vec<f64>,
    pub theta: Vec<f64>,
    /// `dθ/dφ` at each sample.
    pub dtheta_dphi: Vec<f64>,
}

pub fn sample_orbit(energy: f64, p: &SystemParams, samples: usize) -> Result<OrbitSamples> {
    if samples < 8 {
        return Err(Error::InsufficientData {
            needed: 8,
            got: samples,
        });
    }
    let a = turning_points_1d(energy, p)?.a;
    let rule = FixedRule::new(16);
    let h = PI / samples as f64;
    let mut t = Vec::with_capacity(samples + 1);
    t.push(0.0);
    for j in 0..samples {
        let lo = j as f64 * h;
        let dt = rule.integrate(|f| time_density(f, a, p), lo, lo + h);
        t.push(t[j] + dt);
    }
    let period = t[samples];
    let omega = TAU / period;
    let phi: Vec<f64> = (0..samples).map(|j| j as f64 * h).collect();
    Ok(OrbitSamples {
        a,
        period,
        x: phi.iter().map(|f| a * f.sin().powi(2)).collect(),
        theta: t[..samples].iter().map(|t| omega * t).collect(),
        dtheta_dphi: phi.iter().map(|&f| omega * time_density(f, a, p)).collect(),
        phi,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourierAmplitudes {
    pub n: f64,
    pub energy: f64,
    /// Outer turning point of the orbit.
    pub a: f64,
    /// Orbit average `x₀`.
    pub mean: f64,
    /// `x_1 … x_{k_max}`.
    pub coefficients: Vec<f64>,
    /// Largest `|Im x_k|`, zero up to rounding for an orbit even in `θ`.
    pub imag_residue: f64,
    /// `|x_{k_max}| / |x_1| ≤ 1%`.
    pub resolution_ok: bool,
}

impl FourierAmplitudes {
    pub fn k_max(&self) -> usize {
        self.coefficients.len()
    }

    /// `x_k`; `k = 0` gives the mean.
    pub fn x_k(&self, k: usize) -> Option<f64> {
        if k == 0 {
            Some(self.mean)
        } else {
            self.coefficients.get(k - 1).copied()
        }
    }

    /// `−∫₀^{2π} x e^{ikθ} dθ = −2π x_k`.
    pub fn unnormalized(&self, k: usize) -> Option<f64> {
        self.x_k(k).map(|v| -TAU * v)
    }

    /// Truncated series `x₀ + 2 Σ x_k cos kθ`.
    pub fn reconstruct(&self, theta: f64) -> f64 {
        self.mean
            + 2.0
                * self
                    .coefficients
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c * ((i + 1) as f64 * theta).cos())
                    .sum::<f64>()
    }
}

/// Amplitudes of the orbit with energy `energy`.
pub fn fourier_at_energy(energy: f64, k_max: usize, p: &SystemParams, samples: usize) -> Result<FourierAmplitudes> {
    if k_max == 0 {
        return Err(Error::domain("fourier_x_k", "k_max must be ≥ 1"));
    }
    let orbit = sample_orbit(energy, p, samples)?;
    let h = PI / samples as f64;
    let norm = h / TAU;
    let mean = norm * orbit.x.iter().zip(&orbit.dtheta_dphi).map(|(x, w)| x * w).sum::<f64>();
    let mut coefficients = Vec::with_capacity(k_max);
    let mut imag_residue = 0.0_f64;
    for k in 1..=k_max {
        let kf = k as f64;
        let (mut re, mut im) = (0.0, 0.0);
        for j in 0..samples {
            let w = orbit.x[j] * orbit.dtheta_dphi[j];
            let (s, c) = (kf * orbit.theta[j]).sin_cos();
            re += w * c;
            im -= w * s;
        }
        coefficients.push(norm * re);
        imag_residue = imag_residue.max((norm * im).abs());
    }
    let ratio = (coefficients[k_max - 1] / coefficients[0]).abs();
    let resolution_ok = ratio <= RESOLUTION_THRESHOLD;
    if !resolution_ok {
        log::warn!("Fourier series truncated at k = {k_max} with |x_kmax/x_1| = {ratio:.3e} > {RESOLUTION_THRESHOLD}");
    }
    let n = super::exact::action_from_turning_point(orbit.a, p)?;
    Ok(FourierAmplitudes {
        n,
        energy,
        a: orbit.a,
        mean,
        coefficients,
        imag_residue,
        resolution_ok,
    })
}

/// Amplitudes `x_0 … x_{k_max}` of the orbit with action `n`.
pub fn fourier_x_k(n: f64, k_max: usize, p: &SystemParams) -> Result<FourierAmplitudes> {
    let e = energy_of_action(n, p)?;
    let mut amps = fourier_at_energy(e, k_max, p, DEFAULT_ORBIT_SAMPLES)?;
    amps.n = n;
    Ok(amps)
}
