//! Complete elliptic integrals of the first, second and third kind.
//!
//! All three are evaluated through Carlson's symmetric forms `R_F`, `R_D` and
//! `R_J` using the duplication theorem, which keeps the relative error near
//! machine precision over the whole domain, including moduli close to one.
//!
//! Every public function takes the **modulus** `k` (wrapped in
//! [`EllipticModulus`]), never the parameter `m = k²`. The characteristic of
//! the third kind integral is passed as `n` in
//! `Π(n, k) = ∫₀^{π/2} dφ / ((1 − n sin²φ) √(1 − k² sin²φ))`.

use crate::error::{Error, Result};

/// Largest modulus accepted by [`ellip_k`] and [`ellip_pi`]; beyond this `K`
/// is only known to a handful of digits and the caller should switch to the
/// logarithmic expansion.
pub const K_MAX_MODULUS: f64 = 1.0 - 1e-12;

/// Elliptic modulus `k` with its complement `kc = √(1 − k²)` carried explicitly.
///
/// Keeping `kc` avoids forming `1 − k²` by cancellation when `k → 1`, which is
/// exactly where the large-orbit limit of the action lives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticModulus {
    k: f64,
    kc: f64,
}

impl EllipticModulus {
    /// Builds a modulus from `k ∈ [0, 1]`.
    pub fn new(k: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&k) {
            return Err(Error::domain("EllipticModulus", format!("k = {k} outside [0, 1]")));
        }
        let kc = ((1.0 - k) * (1.0 + k)).sqrt();
        Ok(Self { k, kc })
    }

    /// Builds a modulus from `k²` and `kc² = 1 − k²` computed independently by
    /// the caller (for instance `k² = a²/(1+a²)`, `kc² = 1/(1+a²)`).
    pub fn from_squares(k2: f64, kc2: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&k2) || !(0.0..=1.0).contains(&kc2) {
            return Err(Error::domain(
                "EllipticModulus",
                format!("k² = {k2}, kc² = {kc2} outside [0, 1]"),
            ));
        }
        if (k2 + kc2 - 1.0).abs() > 1e-14 {
            return Err(Error::domain(
                "EllipticModulus",
                format!("k² + kc² − 1 = {:e}", k2 + kc2 - 1.0),
            ));
        }
        Ok(Self {
            k: k2.sqrt(),
            kc: kc2.sqrt(),
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn kc(&self) -> f64 {
        self.kc
    }

    pub fn k2(&self) -> f64 {
        self.k * self.k
    }

    pub fn kc2(&self) -> f64 {
        self.kc * self.kc
    }

    /// The complementary modulus `k' = kc`, used by the Legendre relation.
    pub fn complement(&self) -> Self {
        Self { k: self.kc, kc: self.k }
    }

    /// `1 − k`, computed without cancellation.
    pub fn one_minus_k(&self) -> f64 {
        self.kc2() / (1.0 + self.k)
    }

    fn check_below_one(&self, op: &'static str) -> Result<()> {
        if self.one_minus_k() < 1.0 - K_MAX_MODULUS {
            return Err(Error::domain(
                op,
                format!(
                    "k = {} too close to 1 (1 − k = {:e}); K diverges",
                    self.k,
                    self.one_minus_k()
                ),
            ));
        }
        Ok(())
    }
}

// Duplication stops once the series remainder is below this relative size.
const CARLSON_TOL: f64 = 1e-16;

/// Carlson's `R_F(x, y, z)`; at most one argument may be zero.
pub fn carlson_rf(x0: f64, y0: f64, z0: f64) -> f64 {
    let (mut x, mut y, mut z) = (x0, y0, z0);
    let a0 = (x + y + z) / 3.0;
    let q = (3.0 * CARLSON_TOL).powf(-1.0 / 6.0) * (a0 - x).abs().max((a0 - y).abs()).max((a0 - z).abs());
    let mut a = a0;
    let mut scale = 1.0_f64;
    while scale * q >= a.abs() {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * sy + sy * sz + sz * sx;
        a = 0.25 * (a + lambda);
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
        scale *= 0.25;
    }
    let xx = (a0 - x0) * scale / a;
    let yy = (a0 - y0) * scale / a;
    let zz = -(xx + yy);
    let e2 = xx * yy - zz * zz;
    let e3 = xx * yy * zz;
    (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / a.sqrt()
}

/// Carlson's `R_D(x, y, z) = R_J(x, y, z, z)`.
pub fn carlson_rd(x0: f64, y0: f64, z0: f64) -> f64 {
    let (mut x, mut y, mut z) = (x0, y0, z0);
    let a0 = (x + y + 3.0 * z) / 5.0;
    let q = (0.25 * CARLSON_TOL).powf(-1.0 / 6.0) * (a0 - x).abs().max((a0 - y).abs()).max((a0 - z).abs());
    let mut a = a0;
    let mut scale = 1.0_f64;
    let mut sum = 0.0;
    while scale * q >= a.abs() {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * sy + sy * sz + sz * sx;
        sum += scale / (sz * (z + lambda));
        a = 0.25 * (a + lambda);
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
        scale *= 0.25;
    }
    let xx = (a0 - x0) * scale / a;
    let yy = (a0 - y0) * scale / a;
    let zz = -(xx + yy) / 3.0;
    let xy = xx * yy;
    let z2 = zz * zz;
    let e2 = xy - 6.0 * z2;
    let e3 = (3.0 * xy - 8.0 * z2) * zz;
    let e4 = 3.0 * (xy - z2) * z2;
    let e5 = xy * z2 * zz;
    scale / (a * a.sqrt())
        * (1.0 - 3.0 * e2 / 14.0 + e3 / 6.0 + 9.0 * e2 * e2 / 88.0 - 3.0 * e4 / 22.0 - 9.0 * e2 * e3 / 52.0
            + 3.0 * e5 / 26.0)
        + 3.0 * sum
}

/// Carlson's degenerate `R_C(1, 1 + e)`, accurate for small `e`.
fn rc_one(e: f64) -> f64 {
    if e.abs() < 1e-4 {
        1.0 - e / 3.0 + e * e / 5.0 - e * e * e / 7.0
    } else if e > 0.0 {
        let s = e.sqrt();
        s.atan() / s
    } else {
        let s = (-e).sqrt();
        s.atanh() / s
    }
}

/// Carlson's `R_J(x, y, z, p)` for `p > 0`.
pub fn carlson_rj(x0: f64, y0: f64, z0: f64, p0: f64) -> f64 {
    let (mut x, mut y, mut z, mut p) = (x0, y0, z0, p0);
    let a0 = (x + y + z + 2.0 * p) / 5.0;
    let delta = (p - x) * (p - y) * (p - z);
    let q = (0.25 * CARLSON_TOL).powf(-1.0 / 6.0)
        * (a0 - x)
            .abs()
            .max((a0 - y).abs())
            .max((a0 - z).abs())
            .max((a0 - p).abs());
    let mut a = a0;
    let mut scale = 1.0_f64;
    let mut scale3 = 1.0_f64;
    let mut sum = 0.0;
    while scale * q >= a.abs() {
        let (sx, sy, sz, sp) = (x.sqrt(), y.sqrt(), z.sqrt(), p.sqrt());
        let lambda = sx * sy + sy * sz + sz * sx;
        let d = (sp + sx) * (sp + sy) * (sp + sz);
        let e = scale3 * delta / (d * d);
        sum += scale * rc_one(e) / d;
        a = 0.25 * (a + lambda);
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
        p = 0.25 * (p + lambda);
        scale *= 0.25;
        scale3 *= 1.0 / 64.0;
    }
    let xx = (a0 - x0) * scale / a;
    let yy = (a0 - y0) * scale / a;
    let zz = (a0 - z0) * scale / a;
    let pp = -(xx + yy + zz) / 2.0;
    let p2 = pp * pp;
    let e2 = xx * yy + xx * zz + yy * zz - 3.0 * p2;
    let e3 = xx * yy * zz + 2.0 * e2 * pp + 4.0 * p2 * pp;
    let e4 = (2.0 * xx * yy * zz + e2 * pp + 3.0 * p2 * pp) * pp;
    let e5 = xx * yy * zz * p2;
    scale / (a * a.sqrt())
        * (1.0 - 3.0 * e2 / 14.0 + e3 / 6.0 + 9.0 * e2 * e2 / 88.0 - 3.0 * e4 / 22.0 - 9.0 * e2 * e3 / 52.0
            + 3.0 * e5 / 26.0)
        + 6.0 * sum
}

/// Complete elliptic integral of the first kind `K(k)` (modulus convention).
///
/// Errors for `k > 1 − 1e−12`.
pub fn ellip_k(m: EllipticModulus) -> Result<f64> {
    m.check_below_one("ellip_K")?;
    Ok(carlson_rf(0.0, m.kc2(), 1.0))
}

/// Complete elliptic integral of the second kind `E(k)` (modulus convention).
pub fn ellip_e(m: EllipticModulus) -> f64 {
    if m.kc == 0.0 {
        return 1.0;
    }
    let kc2 = m.kc2();
    carlson_rf(0.0, kc2, 1.0) - m.k2() / 3.0 * carlson_rd(0.0, kc2, 1.0)
}

/// `K(k) − E(k)` without the cancellation that plagues small `k`.
pub fn ellip_k_minus_e(m: EllipticModulus) -> Result<f64> {
    m.check_below_one("ellip_K")?;
    Ok(m.k2() / 3.0 * carlson_rd(0.0, m.kc2(), 1.0))
}

/// Complete elliptic integral of the third kind `Π(n, k)` with characteristic
/// `n < 1` (circular and negative-characteristic cases).
pub fn ellip_pi(n: f64, m: EllipticModulus) -> Result<f64> {
    if !n.is_finite() || n >= 1.0 {
        return Err(Error::domain(
            "ellip_Pi",
            format!("characteristic n = {n} must satisfy n < 1"),
        ));
    }
    m.check_below_one("ellip_Pi")?;
    let kc2 = m.kc2();
    let rf = carlson_rf(0.0, kc2, 1.0);
    if n == 0.0 {
        return Ok(rf);
    }
    Ok(rf + n / 3.0 * carlson_rj(0.0, kc2, 1.0, 1.0 - n))
}
