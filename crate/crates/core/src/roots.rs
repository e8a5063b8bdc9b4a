//! Bracketed scalar root finding.

use crate::error::{Error, Result};

/// Brent's method on a sign-changing bracket `[a, b]`.
///
/// Stops when the bracket is narrower than `xtol + 4·ε·|x|`.
pub fn brent<F: FnMut(f64) -> f64>(op: &'static str, mut f: F, mut a: f64, mut b: f64, xtol: f64) -> Result<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::RootFinding {
            op,
            detail: format!("no sign change on [{a}, {b}]: f = ({fa:e}, {fb:e})"),
        });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
        if !fb.is_finite() {
            return Err(Error::RootFinding {
                op,
                detail: format!("non-finite function value at x = {b:?}"),
            });
        }
    }
    Err(Error::RootFinding {
        op,
        detail: "iteration limit reached".into(),
    })
}

/// [`brent`] for a fallible function; the first error raised by `f` aborts the
/// search and is returned.
pub fn brent_try<F: FnMut(f64) -> Result<f64>>(op: &'static str, mut f: F, a: f64, b: f64, xtol: f64) -> Result<f64> {
    let mut failure = None;
    let root = brent(
        op,
        |x| {
            if failure.is_some() {
                return f64::NAN;
            }
            match f(x) {
                Ok(v) => v,
                Err(e) => {
                    failure = Some(e);
                    f64::NAN
                }
            }
        },
        a,
        b,
        xtol,
    );
    match failure {
        Some(e) => Err(e),
        None => root,
    }
}

/// Expands `[lo, hi]` geometrically upwards until `f` changes sign.
pub fn bracket_upward<F: FnMut(f64) -> f64>(
    op: &'static str,
    mut f: F,
    lo: f64,
    mut hi: f64,
    factor: f64,
    max_expansions: usize,
) -> Result<(f64, f64)> {
    let flo = f(lo);
    let mut prev = lo;
    for _ in 0..max_expansions {
        let fhi = f(hi);
        if fhi.signum() != flo.signum() {
            return Ok((prev, hi));
        }
        prev = hi;
        hi = if hi > 0.0 { hi * factor } else { hi / factor };
    }
    Err(Error::RootFinding {
        op,
        detail: format!("could not bracket a root above {lo:?}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cubic_root() {
        let r = brent("test", |x| x * x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2.0f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn rejects_missing_sign_change() {
        assert!(brent("test", |x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn brackets_by_expansion() {
        let (a, b) = bracket_upward("test", |x| x - 37.0, 1.0, 2.0, 2.0, 20).unwrap();
        assert!(a <= 37.0 && 37.0 <= b);
    }
}
