//! Printed asymptotic forms of `H₀(n)`, `ω₀(n)` and the Fourier amplitudes
//! for orbits much larger or much smaller than `√(Z/λ)`.
//!
//! The formulas are evaluated verbatim. The one exception is the large-orbit
//! frequency: its printed form is not the derivative of the printed energy,
//! so [`omega0_large_a`] returns `dH₀/dn` and the printed expression is
//! available as [`omega0_large_a_printed`].

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::potential::SystemParams;

/// The constants `A = 3πλ^{2/3}/(2√2)` and `B = 2√2/(3πλ^{1/4})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticConstants {
    a: f64,
    b: f64,
}

impl AsymptoticConstants {
    pub fn new(lambda: f64) -> Self {
        Self {
            a: 3.0 * PI * lambda.powf(2.0 / 3.0) / (2.0 * SQRT_2),
            b: 2.0 * SQRT_2 / (3.0 * PI * lambda.powf(0.25)),
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }
}

/// Thresholds separating the asymptotic regimes, in units of `√(Z/λ)` for the
/// 1D turning point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeGates {
    pub large_a: f64,
    pub small_a: f64,
    pub min_action_3d: f64,
    pub min_energy_over_lambda_3d: f64,
}

impl Default for RegimeGates {
    fn default() -> Self {
        Self {
            large_a: 10.0,
            small_a: 0.1,
            min_action_3d: 10.0,
            min_energy_over_lambda_3d: 10.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    SmallA,
    Intermediate,
    LargeA,
}

impl RegimeGates {
    /// Classifies an outer turning point `a`.
    pub fn classify(&self, a: f64, p: &SystemParams) -> Regime {
        if p.is_hydrogen() {
            return Regime::SmallA;
        }
        let a_hat = a / (p.z / p.lambda).sqrt();
        if a_hat > self.large_a {
            Regime::LargeA
        } else if a_hat < self.small_a {
            Regime::SmallA
        } else {
            Regime::Intermediate
        }
    }

    pub fn admits_3d(&self, n: f64, energy: f64, p: &SystemParams) -> bool {
        n > self.min_action_3d && energy / p.lambda > self.min_energy_over_lambda_3d
    }
}

fn large_a_log(n: f64, c: &AsymptoticConstants) -> f64 {
    (4.0 * c.b.powf(-2.0 / 3.0) * n.powf(2.0 / 3.0)).ln()
}

/// `H₀ = Z² A n^{2/3} [1 − λ ln(4B^{-2/3} n^{2/3}) / (A² n^{4/3})]`.
pub fn h0_large_a(n: f64, p: &SystemParams) -> f64 {
    let c = AsymptoticConstants::new(p.lambda);
    let z2 = p.z * p.z;
    z2 * c.a * n.powf(2.0 / 3.0) * (1.0 - p.lambda * large_a_log(n, &c) / (c.a * c.a * n.powf(4.0 / 3.0)))
}

/// `dH₀/dn` of [`h0_large_a`]:
/// `(2/3) Z² [A n^{-1/3} + λ (ln(4B^{-2/3} n^{2/3}) − 1) / (A n^{5/3})]`.
pub fn omega0_large_a(n: f64, p: &SystemParams) -> f64 {
    let c = AsymptoticConstants::new(p.lambda);
    2.0 / 3.0
        * p.z
        * p.z
        * (c.a / n.powf(1.0 / 3.0) + p.lambda / (c.a * n.powf(5.0 / 3.0)) * (large_a_log(n, &c) - 1.0))
}

/// The frequency as printed:
/// `(2/3) Z² [A/n^{1/3} + λ ln(4A√λ n^{2/3})/(A n^{5/3}) − 1]`.
pub fn omega0_large_a_printed(n: f64, p: &SystemParams) -> f64 {
    let c = AsymptoticConstants::new(p.lambda);
    let log = (4.0 * c.a * p.lambda.sqrt() * n.powf(2.0 / 3.0)).ln();
    2.0 / 3.0 * p.z * p.z * (c.a / n.powf(1.0 / 3.0) + p.lambda / (c.a * n.powf(5.0 / 3.0)) * log - 1.0)
}

/// `H₀ = 0.5 Z² (9.7 λ n² − n^{-2})`.
pub fn h0_small_a(n: f64, p: &SystemParams) -> f64 {
    0.5 * p.z * p.z * (9.7 * p.lambda * n * n - 1.0 / (n * n))
}

/// `ω₀ = Z² (n^{-3} + 9.7 n λ)`.
pub fn omega0_small_a(n: f64, p: &SystemParams) -> f64 {
    p.z * p.z * (1.0 / n.powi(3) + 9.7 * n * p.lambda)
}

/// `sin²(πk√λ/2)/λ`, continued to `π²k²/4` at `λ = 0`.
pub(crate) fn sin2_over_lambda(k: f64, lambda: f64) -> f64 {
    let arg = 0.5 * PI * k * lambda.sqrt();
    if arg < 1e-6 {
        (0.5 * PI * k).powi(2) * (1.0 - arg * arg / 3.0)
    } else {
        arg.sin().powi(2) / lambda
    }
}

/// `x_k ≈ −(4E(n)/λ)(1/k) sin²(πk√λ/2)` with `E(n)` from [`h0_small_a`].
pub fn fourier_small_a(n: f64, k: u32, p: &SystemParams) -> f64 {
    let kf = f64::from(k);
    -4.0 * h0_small_a(n, p) / kf * sin2_over_lambda(kf, p.lambda)
}

/// `x_k = −2A n^{2/3} / (π² λ k²)`.
pub fn fourier_large_a(n: f64, k: u32, p: &SystemParams) -> f64 {
    let c = AsymptoticConstants::new(p.lambda);
    let kf = f64::from(k);
    -2.0 * c.a * n.powf(2.0 / 3.0) / (PI * PI * p.lambda * kf * kf)
}
