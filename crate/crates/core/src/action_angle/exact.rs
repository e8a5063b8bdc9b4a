//! Definitional action, period and angle of the 1D bound motion.
//!
//! With the outer turning point `a` the kinetic term factorizes as
//! `E − V(x) = (a − x)(λx + Z/a)/x`, so the substitution `x = a sin²φ` turns
//! every orbit integral into a smooth integrand on `φ ∈ [0, π/2]`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::elliptic::{ellip_e, ellip_k, ellip_k_minus_e, EllipticModulus};
use crate::error::{Error, Result};
use crate::potential::{turning_points_1d, SystemParams};
use crate::quadrature::{integrate, Tolerance};
use crate::roots::brent_try;

/// `λx + Z/a`, the regular factor of `(E − V)·x/(a − x)`.
#[inline]
pub(crate) fn regular_factor(x: f64, a: f64, p: &SystemParams) -> f64 {
    p.lambda * x + p.z / a
}

/// `dt/dφ` along the outgoing leg, with `x = a sin²φ`.
#[inline]
pub(crate) fn time_density(phi: f64, a: f64, p: &SystemParams) -> f64 {
    let s2 = phi.sin().powi(2);
    2.0 * a * s2 / (2.0 * regular_factor(a * s2, a, p)).sqrt()
}

fn outer_turning_point(energy: f64, p: &SystemParams) -> Result<f64> {
    Ok(turning_points_1d(energy, p)?.a)
}

/// Energy at which `a` is the outer turning point, `E = λa − Z/a`.
pub fn energy_at_turning_point(a: f64, p: &SystemParams) -> f64 {
    p.lambda * a - p.z / a
}

/// Action `n = (1/2π)∮p dx = (1/π)∫₀^a √(2(E − V)) dx` by adaptive quadrature.
pub fn action_1d_quadrature(energy: f64, p: &SystemParams) -> Result<f64> {
    let a = outer_turning_point(energy, p)?;
    action_from_turning_point(a, p)
}

pub(crate) fn action_from_turning_point(a: f64, p: &SystemParams) -> Result<f64> {
    let f = |phi: f64| {
        let (s, c) = phi.sin_cos();
        2.0 * a * c * c * (2.0 * regular_factor(a * s * s, a, p)).sqrt()
    };
    Ok(integrate(f, 0.0, FRAC_PI_2, Tolerance::default())? / PI)
}

/// Multiplier that maps the printed elliptic expression for the action onto
/// the definitional integral: `n = Z^{3/4} · (printed form in â = a/√(Z/λ))`.
pub fn closed_form_convention_constant(p: &SystemParams) -> f64 {
    p.z.powf(0.75)
}

/// Modulus of the closed form, `k² = â²/(â² + 1)` in chart units.
pub fn modulus_k(a_hat: f64) -> Result<EllipticModulus> {
    if !(a_hat > 0.0 && a_hat.is_finite()) {
        return Err(Error::domain("modulus_k", format!("â = {a_hat} must be > 0")));
    }
    let d = 1.0 + a_hat * a_hat;
    EllipticModulus::from_squares(a_hat * a_hat / d, 1.0 / d)
}

/// The printed elliptic form `B √(â + 1/â) [(â − 1/â) E(k) + K(k)/â]` with
/// `B = 2√2 / (3π λ^{1/4})`, evaluated in chart units without the convention
/// constant.
pub fn action_1d_printed(energy: f64, p: &SystemParams) -> Result<f64> {
    if p.is_hydrogen() {
        return Err(Error::domain("action_1d_closed", "requires λ > 0"));
    }
    let a_hat = p.to_chart_units(outer_turning_point(energy, p)?)?;
    let m = modulus_k(a_hat)?;
    let b = 2.0 * std::f64::consts::SQRT_2 / (3.0 * PI * p.lambda.powf(0.25));
    // (â − 1/â)E + K/â = âE + (K − E)/â avoids cancellation at small â
    let bracket = a_hat * ellip_e(m) + ellip_k_minus_e(m)? / a_hat;
    Ok(b * (a_hat + 1.0 / a_hat).sqrt() * bracket)
}

/// Action from the complete elliptic integrals, including the convention
/// constant [`closed_form_convention_constant`].
pub fn action_1d_closed(energy: f64, p: &SystemParams) -> Result<f64> {
    Ok(closed_form_convention_constant(p) * action_1d_printed(energy, p)?)
}

/// Energy with action `n`, by Brent's method on the definitional action.
pub fn energy_of_action(n: f64, p: &SystemParams) -> Result<f64> {
    p.require_1d("energy_of_action")?;
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::domain("energy_of_action", format!("n = {n} must be > 0")));
    }
    if p.is_hydrogen() {
        return Ok(-p.z * p.z / (2.0 * n * n));
    }
    // The Coulomb term only lowers V, the linear term only raises it, so the
    // pure-Coulomb and pure-linear energies bracket the answer.
    let lo = if p.z > 0.0 { -p.z * p.z / (2.0 * n * n) } else { 0.0 };
    let hi = (3.0 * PI * p.lambda * n / (2.0 * std::f64::consts::SQRT_2)).powf(2.0 / 3.0);
    let scale = lo.abs().max(hi.abs());
    brent_try(
        "energy_of_action",
        |e| Ok(action_1d_quadrature(e, p)? - n),
        lo,
        hi,
        1e-15 * scale,
    )
}

/// Orbital period `T = 2∫₀^a dx/√(2(E − V))`.
pub fn period(energy: f64, p: &SystemParams) -> Result<f64> {
    let a = outer_turning_point(energy, p)?;
    period_from_turning_point(a, p)
}

pub(crate) fn period_from_turning_point(a: f64, p: &SystemParams) -> Result<f64> {
    Ok(2.0 * integrate(|phi| time_density(phi, a, p), 0.0, FRAC_PI_2, Tolerance::default())?)
}

/// Proper frequency `ω₀ = 2π/T = dE/dn`.
pub fn omega0_exact(energy: f64, p: &SystemParams) -> Result<f64> {
    Ok(TAU / period(energy, p)?)
}

/// `dω₀/dn` from the analytic derivative of the period integral.
pub fn omega0_prime_exact(energy: f64, p: &SystemParams) -> Result<f64> {
    let a = outer_turning_point(energy, p)?;
    let t = period_from_turning_point(a, p)?;
    // T(a) = 4a ∫ sin²φ (2q)^{-1/2} dφ with q = λ a sin²φ + Z/a
    let dq = |phi: f64| {
        let s2 = phi.sin().powi(2);
        let q = regular_factor(a * s2, a, p);
        let dq_da = p.lambda * s2 - p.z / (a * a);
        -4.0 * a * s2 * dq_da / (2.0 * q).powf(1.5)
    };
    let dt_da = t / a + integrate(dq, 0.0, FRAC_PI_2, Tolerance::default())?;
    let da_de = 1.0 / (p.lambda + p.z / (a * a));
    let omega = TAU / t;
    // dω/dn = (dω/dE)·ω
    Ok(-omega / t * dt_da * da_de * omega)
}

/// Direction of motion along the orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Moving away from the wall, `p > 0`.
    Outgoing,
    /// Returning towards the wall, `p < 0`.
    Incoming,
}

/// Angle variable `θ = ω₀ t`, measured from the collision with the wall:
/// `θ ∈ [0, π]` on the outgoing leg and `2π − θ` on the way back.
pub fn angle_of_x(x: f64, energy: f64, branch: Branch, p: &SystemParams) -> Result<f64> {
    let a = outer_turning_point(energy, p)?;
    if !(x > 0.0 && x <= a * (1.0 + 1e-14)) {
        return Err(Error::domain("angle_of_x", format!("x = {x} outside (0, a = {a}]")));
    }
    let phi = (x / a).min(1.0).sqrt().asin();
    let t = integrate(|f| time_density(f, a, p), 0.0, phi, Tolerance::default())?;
    let theta = TAU * t / period_from_turning_point(a, p)?;
    Ok(match branch {
        Branch::Outgoing => theta,
        Branch::Incoming => (TAU - theta) % TAU,
    })
}

/// The printed closed-form angle
/// `B√(x̂+1/x̂)[(x̂+1/x̂)(E−K)/k + (1/x̂)K(E − k kc K)/(k kc)]·dk/dn`, with
/// `x̂` in chart units and `dk/dn` by a centered difference along the exact
/// action. Kept only to quantify its disagreement with [`angle_of_x`].
pub fn angle_printed(x: f64, energy: f64, p: &SystemParams) -> Result<f64> {
    let x_hat = p.to_chart_units(x)?;
    let a = outer_turning_point(energy, p)?;
    let n = action_from_turning_point(a, p)?;
    let k_of_n = |n: f64| -> Result<f64> {
        let e = energy_of_action(n, p)?;
        Ok(modulus_k(p.to_chart_units(outer_turning_point(e, p)?)?)?.k())
    };
    let h = 1e-5 * n;
    let dk_dn = (k_of_n(n + h)? - k_of_n(n - h)?) / (2.0 * h);
    let m = modulus_k(p.to_chart_units(a)?)?;
    let (k, kc) = (m.k(), m.kc());
    let (kk, ee) = (ellip_k(m)?, ellip_e(m));
    let b = 2.0 * std::f64::consts::SQRT_2 / (3.0 * PI * p.lambda.powf(0.25));
    let s = x_hat + 1.0 / x_hat;
    Ok(b * s.sqrt() * (s * (ee - kk) / k * dk_dn + kk / x_hat * (ee - k * kc * kk) / (k * kc) * dk_dn))
}
