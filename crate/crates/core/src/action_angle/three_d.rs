//! Radial action of the 3D problem and its large-action asymptotics.
//!
//! The radicand factorizes as `2λ(a − r)(r − b)(r − c)/r²`. The physical
//! radial motion runs between the inner and outer turning points `b` and `a`,
//! and the radial action is `n = (1/π)∫_b^a p_r dr`.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use crate::elliptic::{ellip_e, ellip_k, ellip_pi, EllipticModulus};
use crate::error::{Error, Result};
use crate::potential::{turning_points_3d, SystemParams};
use crate::quadrature::{integrate, Tolerance};
use crate::roots::brent_try;

/// Ratio between the printed action normalization `∫ √(E − …) dr` and the
/// radial action `(1/π)∫ √(2(E − …)) dr`.
pub const PRINTED_ACTION_SCALE: f64 = PI / SQRT_2;

/// Radial action by adaptive quadrature with `r = b + (a − b) sin²φ`.
pub fn action_3d_quadrature(energy: f64, p: &SystemParams) -> Result<f64> {
    let tp = turning_points_3d(energy, p)?;
    let w = tp.a - tp.b;
    if w <= 0.0 {
        return Ok(0.0);
    }
    let f = |phi: f64| {
        let (s, c) = phi.sin_cos();
        let r = tp.b + w * s * s;
        2.0 * w * w * s * s * c * c * (2.0 * p.lambda * (r - tp.c)).sqrt() / r
    };
    Ok(integrate(f, 0.0, FRAC_PI_2, Tolerance::default())? / PI)
}

/// The printed elliptic expression
/// `[(2Z/3 − ℓ²/c + Ec/3) K + E(a − c)/3 · E(k) + ℓ²(1/c − 1/b) Π(β, k)] g/√λ`
/// with `k² = (a − b)/(a − c)`, characteristic `β = ck²/b`, `g = 2/√(a − c)`
/// and `ℓ² = γL²` the centrifugal coefficient of the active convention.
///
/// Since `c < 0 < b`, the characteristic is always negative, so the third
/// kind integral never reaches its hyperbolic branch.
pub fn action_3d_printed(energy: f64, p: &SystemParams) -> Result<f64> {
    let tp = turning_points_3d(energy, p)?;
    let (a, b, c) = (tp.a, tp.b, tp.c);
    let l2 = p.centrifugal.coefficient() * p.l * p.l;
    let ac = a - c;
    let m = EllipticModulus::from_squares((a - b) / ac, (b - c) / ac)?;
    let beta = c * m.k2() / b;
    let g = 2.0 / ac.sqrt();
    let bracket = (2.0 * p.z / 3.0 - l2 / c + energy * c / 3.0) * ellip_k(m)?
        + energy * ac / 3.0 * ellip_e(m)
        + l2 * (1.0 / c - 1.0 / b) * ellip_pi(beta, m)?;
    Ok(bracket * g / p.lambda.sqrt())
}

/// Radial action from the elliptic closed form, `n = (√2/π) × printed`.
pub fn action_3d_closed(energy: f64, p: &SystemParams) -> Result<f64> {
    Ok(action_3d_printed(energy, p)? / PRINTED_ACTION_SCALE)
}

/// Energy with radial action `n` at the angular momentum in `p`.
pub fn energy_of_action_3d(n: f64, p: &SystemParams) -> Result<f64> {
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::domain("energy_of_action_3d", format!("n = {n} must be > 0")));
    }
    let (e_c, _) = crate::potential::circular_orbit(p)?;
    let lo = e_c + 1e-12 * e_c.abs().max(1.0);
    // Linear-potential estimate with the angular momentum added to the action.
    let guess = (3.0 * PI * p.lambda * (n + p.l) / (2.0 * SQRT_2)).powf(2.0 / 3.0);
    let mut hi = guess.max(e_c.abs()) + e_c.abs().max(1.0);
    let f = |e: f64| -> Result<f64> { Ok(action_3d_quadrature(e, p)? - n) };
    let mut tries = 0;
    while f(hi)? < 0.0 {
        hi = 2.0 * hi.abs() + 1.0;
        tries += 1;
        if tries > 60 {
            return Err(Error::RootFinding {
                op: "energy_of_action_3d",
                detail: format!("no bracket for n = {n:?}"),
            });
        }
    }
    brent_try("energy_of_action_3d", f, lo, hi, 1e-15 * hi.abs().max(1.0))
}

/// `H₀ = (3λñ/2)^{2/3} [1 + πL/(3ñ)]` with `ñ = (π/√2) n` the action in the
/// printed normalization.
pub fn h0_3d(n: f64, l: f64, p: &SystemParams) -> f64 {
    let np = PRINTED_ACTION_SCALE * n;
    (1.5 * p.lambda * np).powf(2.0 / 3.0) * (1.0 + PI * l / (3.0 * np))
}

/// `ω₀ = (2λ²/3)^{1/3} [ñ^{-1/3} − (πL/6) ñ^{-4/3}]`, i.e. `dH₀/dñ`.
pub fn omega0_3d_printed(n: f64, l: f64, p: &SystemParams) -> f64 {
    let np = PRINTED_ACTION_SCALE * n;
    (2.0 * p.lambda * p.lambda / 3.0).cbrt() * (np.powf(-1.0 / 3.0) - PI * l / 6.0 * np.powf(-4.0 / 3.0))
}

/// `dH₀/dn` in the radial-action normalization, `(π/√2) × dH₀/dñ`.
pub fn omega0_3d(n: f64, l: f64, p: &SystemParams) -> f64 {
    PRINTED_ACTION_SCALE * omega0_3d_printed(n, l, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{circular_orbit, CentrifugalConvention};
    use approx::assert_relative_eq;

    fn params(l: f64) -> SystemParams {
        SystemParams::new(0.15, 0.4).unwrap().with_angular_momentum(l).unwrap()
    }

    #[test]
    fn quadrature_reference() {
        // 40-digit values at (Z, λ, L, E) = (0.15, 0.4, 0.3, 1.0)
        let p = params(0.3);
        assert_relative_eq!(
            action_3d_quadrature(1.0, &p).unwrap(),
            0.746_197_264_022_441_823_5,
            max_relative = 1e-12
        );
        let pp = p.with_centrifugal(CentrifugalConvention::Printed);
        assert_relative_eq!(
            action_3d_quadrature(1.0, &pp).unwrap(),
            0.668_353_819_109_557_256_3,
            max_relative = 1e-12
        );
    }

    #[test]
    fn closed_form_matches_quadrature() {
        for conv in [CentrifugalConvention::Textbook, CentrifugalConvention::Printed] {
            for &(e, l) in &[(1.0, 0.3), (2.0, 0.5), (5.0, 1.0), (1.0, 0.01)] {
                let p = params(l).with_centrifugal(conv);
                assert_relative_eq!(
                    action_3d_closed(e, &p).unwrap(),
                    action_3d_quadrature(e, &p).unwrap(),
                    max_relative = 1e-10
                );
            }
        }
    }

    #[test]
    fn printed_normalization_values() {
        let p = params(0.3).with_centrifugal(CentrifugalConvention::Printed);
        assert_relative_eq!(
            action_3d_printed(1.0, &p).unwrap(),
            1.484_708_889_787_417_4,
            max_relative = 1e-11
        );
    }

    #[test]
    fn small_angular_momentum_limit() {
        let p1 = SystemParams::new(0.15, 0.4).unwrap();
        let one_d = crate::action_angle::action_1d_quadrature(1.0, &p1).unwrap();
        let n = action_3d_quadrature(1.0, &params(1e-4)).unwrap();
        assert!((n - one_d).abs() < 1e-3);
    }

    #[test]
    fn circular_orbit_has_zero_radial_action() {
        let p = params(0.3);
        let (ec, _) = circular_orbit(&p).unwrap();
        assert!(action_3d_quadrature(ec + 1e-10, &p).unwrap() < 1e-5);
        assert!(action_3d_closed(ec + 1e-10, &p).unwrap().abs() < 1e-5);
    }

    #[test]
    fn energy_round_trip() {
        let p = params(0.3);
        for &n in &[0.2, 1.0, 5.0, 30.0] {
            let e = energy_of_action_3d(n, &p).unwrap();
            assert_relative_eq!(action_3d_quadrature(e, &p).unwrap(), n, max_relative = 1e-11);
        }
    }

    #[test]
    fn asymptotic_frequency_is_derivative() {
        let p = params(0.0);
        for &(n, l) in &[(10.0, 0.0), (20.0, 1.0), (50.0, 3.0)] {
            let h = 1e-4;
            let fd = (h0_3d(n + h, l, &p) - h0_3d(n - h, l, &p)) / (2.0 * h);
            assert_relative_eq!(omega0_3d(n, l, &p), fd, max_relative = 1e-5);
        }
    }

    #[test]
    fn asymptotic_energy_approaches_exact() {
        // the printed L-correction carries the L²/r² centrifugal convention
        let l = 1.0;
        let p = params(l).with_centrifugal(CentrifugalConvention::Printed);
        let mut prev = f64::INFINITY;
        for &n in &[10.0, 20.0, 40.0, 80.0, 160.0] {
            let exact = energy_of_action_3d(n, &p).unwrap();
            let err = (h0_3d(n, l, &p) / exact - 1.0).abs();
            assert!(err < prev, "n = {n}: {err} ≥ {prev}");
            prev = err;
        }
        assert!(prev < 0.01);
    }
}
