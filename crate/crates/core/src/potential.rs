//! The unperturbed Coulomb-plus-linear system and its turning points.
//!
//! Units are natural with unit mass: `Z` is dimensionless, `λ` is a force
//! (energy per length) and the conversion to physical units happens only at
//! the command-line boundary.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Normalization of the centrifugal term in the 3D radial problem.
///
/// `Textbook` uses `L²/(2r²)` (unit mass); `Printed` uses `L²/r²` as written
/// in the original 3D Hamiltonian. The two differ by `L → √2·L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CentrifugalConvention {
    #[cfg_attr(not(feature = "printed-centrifugal"), default)]
    Textbook,
    #[cfg_attr(feature = "printed-centrifugal", default)]
    Printed,
}

impl CentrifugalConvention {
    /// Coefficient `γ` in `γ L² / r²`.
    pub fn coefficient(self) -> f64 {
        match self {
            CentrifugalConvention::Textbook => 0.5,
            CentrifugalConvention::Printed => 1.0,
        }
    }
}

/// Parameters of the unperturbed system `p²/2 − Z/x + λx`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Coulomb coupling, `Z = 4α_s/3` for quarkonium.
    pub z: f64,
    /// Confining force; `0` selects the hydrogen baseline.
    pub lambda: f64,
    /// Angular momentum (3D only; every 1D operation requires `0`).
    #[serde(default)]
    pub l: f64,
    /// Particle mass in MeV, used only to convert results to physical units.
    #[serde(default)]
    pub mass_scale_mev: Option<f64>,
    #[serde(default)]
    pub centrifugal: CentrifugalConvention,
}

impl SystemParams {
    /// Quarkonium-mode 1D parameters.
    pub fn new(z: f64, lambda: f64) -> Result<Self> {
        let p = Self {
            z,
            lambda,
            l: 0.0,
            mass_scale_mev: None,
            centrifugal: CentrifugalConvention::default(),
        };
        p.validate()?;
        Ok(p)
    }

    /// Hydrogen-baseline parameters (`λ = 0`).
    pub fn hydrogen(z: f64) -> Result<Self> {
        Self::new(z, 0.0)
    }

    pub fn with_angular_momentum(mut self, l: f64) -> Result<Self> {
        self.l = l;
        self.validate()?;
        Ok(self)
    }

    pub fn with_centrifugal(mut self, c: CentrifugalConvention) -> Self {
        self.centrifugal = c;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.z.is_finite() && self.z >= 0.0) {
            return Err(Error::domain("SystemParams", format!("Z = {:?} must be ≥ 0", self.z)));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::domain(
                "SystemParams",
                format!("λ = {:?} must be ≥ 0", self.lambda),
            ));
        }
        if self.lambda == 0.0 && self.z == 0.0 {
            return Err(Error::domain("SystemParams", "Z = λ = 0 has no bound states"));
        }
        if !(self.l.is_finite() && self.l >= 0.0) {
            return Err(Error::domain("SystemParams", format!("L = {:?} must be ≥ 0", self.l)));
        }
        Ok(())
    }

    pub fn is_hydrogen(&self) -> bool {
        self.lambda == 0.0
    }

    pub(crate) fn require_1d(&self, op: &'static str) -> Result<()> {
        if self.l != 0.0 {
            return Err(Error::domain(
                op,
                format!("1D operation requires L = 0, got {:?}", self.l),
            ));
        }
        Ok(())
    }

    /// Length scale `√(Z/λ)` of the dimensionless chart, where the Coulomb and
    /// linear terms of the potential are equal in magnitude.
    pub fn chart_length_scale(&self) -> Result<f64> {
        if self.lambda <= 0.0 || self.z <= 0.0 {
            return Err(Error::domain("chart_length_scale", "requires Z > 0 and λ > 0"));
        }
        Ok((self.z / self.lambda).sqrt())
    }

    /// Rescales a length into the dimensionless chart `x̂ = x / √(Z/λ)`, in
    /// which the product of the quadratic roots is `−1`.
    pub fn to_chart_units(&self, x: f64) -> Result<f64> {
        Ok(x / self.chart_length_scale()?)
    }

    pub fn from_chart_units(&self, x_hat: f64) -> Result<f64> {
        Ok(x_hat * self.chart_length_scale()?)
    }
}

/// Monochromatic drive `U(x, t) = ε x cos(ωt + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    pub epsilon: f64,
    pub omega: f64,
    #[serde(default)]
    pub phase: f64,
}

impl DriveParams {
    pub fn new(epsilon: f64, omega: f64) -> Result<Self> {
        let d = Self {
            epsilon,
            omega,
            phase: 0.0,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(Error::domain(
                "DriveParams",
                format!("ε = {:?} must be ≥ 0", self.epsilon),
            ));
        }
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::domain(
                "DriveParams",
                format!("ω = {:?} must be > 0", self.omega),
            ));
        }
        Ok(())
    }

    pub fn period(&self) -> f64 {
        std::f64::consts::TAU / self.omega
    }
}

/// `V(x) = −Z/x + λx` for `x > 0`; the region `x ≤ 0` is an infinite wall.
pub fn potential_1d(x: f64, p: &SystemParams) -> Result<f64> {
    if x <= 0.0 || x.is_nan() {
        return Err(Error::domain("potential_1d", format!("x = {x} is inside the wall")));
    }
    Ok(-p.z / x + p.lambda * x)
}

/// `dV/dx = Z/x² + λ`.
pub fn potential_slope_1d(x: f64, p: &SystemParams) -> Result<f64> {
    if x <= 0.0 || x.is_nan() {
        return Err(Error::domain(
            "potential_slope_1d",
            format!("x = {x} is inside the wall"),
        ));
    }
    Ok(p.z / (x * x) + p.lambda)
}

/// Roots of `λx² − Ex − Z = 0`: the outer turning point `a` and the negative
/// root `c`. In hydrogen mode `c` does not exist.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurningPoints1D {
    pub a: f64,
    pub c: Option<f64>,
}

pub fn turning_points_1d(energy: f64, p: &SystemParams) -> Result<TurningPoints1D> {
    p.require_1d("turning_points_1d")?;
    if !energy.is_finite() {
        return Err(Error::domain("turning_points_1d", format!("E = {energy:?}")));
    }
    if p.is_hydrogen() {
        if energy >= 0.0 {
            return Err(Error::Unbound(format!("hydrogen mode requires E < 0, got {energy}")));
        }
        return Ok(TurningPoints1D {
            a: -p.z / energy,
            c: None,
        });
    }
    let d = (energy * energy + 4.0 * p.z * p.lambda).sqrt();
    // Pick the cancellation-free form of each root; a·c = −Z/λ.
    let (a, c) = if energy >= 0.0 {
        ((energy + d) / (2.0 * p.lambda), -2.0 * p.z / (energy + d))
    } else {
        (2.0 * p.z / (d - energy), (energy - d) / (2.0 * p.lambda))
    };
    if !(a > 0.0) {
        return Err(Error::Unbound(format!("no positive turning point for E = {energy:?}")));
    }
    Ok(TurningPoints1D { a, c: Some(c) })
}

/// Ordered roots `a ≥ b > 0 > c` of the radial cubic
/// `λr³ − Er² − Zr + γL² = 0`, where `γ` follows the centrifugal convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurningPoints3D {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// `2(E − γL²/r² + Z/r − λr)`, the squared radial momentum.
pub fn radial_radicand_3d(r: f64, energy: f64, p: &SystemParams) -> f64 {
    let gl2 = p.centrifugal.coefficient() * p.l * p.l;
    2.0 * (energy - gl2 / (r * r) + p.z / r - p.lambda * r)
}

/// Effective radial potential `−Z/r + λr + γL²/r²`.
pub fn effective_potential_3d(r: f64, p: &SystemParams) -> f64 {
    let gl2 = p.centrifugal.coefficient() * p.l * p.l;
    -p.z / r + p.lambda * r + gl2 / (r * r)
}

fn cubic(r: f64, energy: f64, p: &SystemParams, gl2: f64) -> f64 {
    ((p.lambda * r - energy) * r - p.z) * r + gl2
}

fn cubic_slope(r: f64, energy: f64, p: &SystemParams) -> f64 {
    (3.0 * p.lambda * r - 2.0 * energy) * r - p.z
}

fn polish(mut r: f64, energy: f64, p: &SystemParams, gl2: f64) -> f64 {
    for _ in 0..3 {
        let d = cubic_slope(r, energy, p);
        if d == 0.0 {
            break;
        }
        let step = cubic(r, energy, p, gl2) / d;
        if !step.is_finite() {
            break;
        }
        r -= step;
    }
    r
}

pub fn turning_points_3d(energy: f64, p: &SystemParams) -> Result<TurningPoints3D> {
    if p.lambda <= 0.0 || p.l <= 0.0 {
        return Err(Error::domain(
            "turning_points_3d",
            format!("requires λ > 0 and L > 0, got λ = {:?}, L = {:?}", p.lambda, p.l),
        ));
    }
    let gl2 = p.centrifugal.coefficient() * p.l * p.l;
    // Monic form r³ + B r² + C r + D.
    let bb = -energy / p.lambda;
    let cc = -p.z / p.lambda;
    let dd = gl2 / p.lambda;
    let disc = 18.0 * bb * cc * dd - 4.0 * bb.powi(3) * dd + bb * bb * cc * cc - 4.0 * cc.powi(3) - 27.0 * dd * dd;
    let scale = (bb * bb * cc * cc).abs()
        + 4.0 * cc.abs().powi(3)
        + 27.0 * dd * dd
        + (18.0 * bb * cc * dd).abs()
        + (4.0 * bb.powi(3) * dd).abs();
    if disc < -1e-12 * scale {
        return Err(Error::NoBoundOrbit {
            energy,
            angular_momentum: p.l,
            discriminant: disc,
        });
    }
    let pp = cc - bb * bb / 3.0;
    let qq = 2.0 * bb.powi(3) / 27.0 - bb * cc / 3.0 + dd;
    let m = 2.0 * (-pp / 3.0).sqrt();
    let arg = (3.0 * qq / (pp * m)).clamp(-1.0, 1.0);
    let phi = arg.acos() / 3.0;
    let shift = bb / 3.0;
    let mut roots = [
        m * phi.cos() - shift,
        m * (phi - std::f64::consts::TAU / 3.0).cos() - shift,
        m * (phi - 2.0 * std::f64::consts::TAU / 3.0).cos() - shift,
    ];
    roots.sort_by(|x, y| y.total_cmp(x));
    let a = polish(roots[0], energy, p, gl2);
    let c = polish(roots[2], energy, p, gl2);
    // The small middle root loses digits in the trigonometric form; Vieta
    // (abc = −γL²/λ) recovers it from the two large ones.
    let mut b = polish(-dd / (a * c), energy, p, gl2);
    let mut a = a;
    if b > a {
        // circular orbit: the two upper roots merge
        let mid = 0.5 * (a + b);
        a = mid;
        b = mid;
    }
    if !(c < 0.0 && b > 0.0) {
        return Err(Error::NoBoundOrbit {
            energy,
            angular_momentum: p.l,
            discriminant: disc,
        });
    }
    Ok(TurningPoints3D { a, b, c })
}

/// Energy and radius of the circular orbit with angular momentum `p.l`, where
/// the effective potential has its minimum.
pub fn circular_orbit(p: &SystemParams) -> Result<(f64, f64)> {
    if p.lambda <= 0.0 || p.l <= 0.0 {
        return Err(Error::domain("circular_orbit", "requires λ > 0 and L > 0"));
    }
    let gl2 = p.centrifugal.coefficient() * p.l * p.l;
    // V' = 0  ⇔  λr³ + Zr − 2γL² = 0, monotone in r.
    let f = |r: f64| (p.lambda * r * r + p.z) * r - 2.0 * gl2;
    // Each positive term alone bounds the root from above.
    let mut hi = (2.0 * gl2 / p.lambda).cbrt();
    if p.z > 0.0 {
        hi = hi.min(2.0 * gl2 / p.z);
    }
    let r = crate::roots::brent("circular_orbit", f, 0.0, hi * (1.0 + 1e-12), 1e-16 * hi)?;
    Ok((effective_potential_3d(r, p), r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn quark() -> SystemParams {
        SystemParams::new(0.15, 0.4).unwrap()
    }

    #[test]
    fn potential_values() {
        let p = SystemParams::new(1.0, 1.0).unwrap();
        assert_eq!(potential_1d(1.0, &p).unwrap(), 0.0);
        assert_relative_eq!(potential_1d(2.0, &quark()).unwrap(), 0.725, max_relative = 1e-15);
        assert!(potential_1d(0.0, &p).is_err());
        assert!(potential_1d(-1.0, &p).is_err());
    }

    #[test]
    fn slope_matches_finite_difference() {
        let p = quark();
        for &x in &[0.05, 0.3, 1.0, 7.0] {
            let h = 1e-5 * x;
            let fd = (potential_1d(x + h, &p).unwrap() - potential_1d(x - h, &p).unwrap()) / (2.0 * h);
            assert_relative_eq!(potential_slope_1d(x, &p).unwrap(), fd, max_relative = 1e-7);
        }
    }

    #[test]
    fn chart_scale_round_trip() {
        let p = quark();
        let s = p.chart_length_scale().unwrap();
        assert_relative_eq!(s, (0.15f64 / 0.4).sqrt());
        assert_relative_eq!(p.from_chart_units(p.to_chart_units(3.3).unwrap()).unwrap(), 3.3);
        assert!(SystemParams::hydrogen(1.0).unwrap().chart_length_scale().is_err());
    }

    #[test]
    fn turning_points_1d_examples() {
        let p = quark();
        let tp = turning_points_1d(0.0, &p).unwrap();
        assert_relative_eq!(tp.a, 0.612_372_435_695_794_5, max_relative = 1e-14);
        assert_relative_eq!(tp.c.unwrap(), -tp.a, max_relative = 1e-14);

        let lin = SystemParams::new(0.0, 1.0).unwrap();
        let tp = turning_points_1d(1.0, &lin).unwrap();
        assert_eq!(tp.a, 1.0);
        assert_eq!(tp.c.unwrap(), 0.0);

        let tp = turning_points_1d(1.0, &p).unwrap();
        let s = 1.24f64.sqrt();
        assert_relative_eq!(tp.a, (1.0 + s) / 0.8, max_relative = 1e-14);
        assert_relative_eq!(tp.c.unwrap(), (1.0 - s) / 0.8, max_relative = 1e-13);
        assert_relative_eq!(tp.a - tp.c.unwrap(), s / 0.4, max_relative = 1e-14);
        assert_relative_eq!(potential_1d(tp.a, &p).unwrap(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn turning_points_1d_monotone() {
        let p = quark();
        let mut prev: Option<TurningPoints1D> = None;
        for i in 0..200 {
            let e = -50.0 + 0.5 * i as f64;
            let tp = turning_points_1d(e, &p).unwrap();
            let v = potential_1d(tp.a, &p).unwrap();
            assert!((v - e).abs() <= 1e-10 * e.abs().max(1.0));
            if let Some(prev) = prev {
                assert!(tp.a > prev.a);
                assert!(tp.c.unwrap().abs() < prev.c.unwrap().abs());
            }
            prev = Some(tp);
        }
    }

    #[test]
    fn hydrogen_turning_points() {
        let p = SystemParams::hydrogen(1.0).unwrap();
        let tp = turning_points_1d(-0.5, &p).unwrap();
        assert_eq!(tp.a, 2.0);
        assert!(tp.c.is_none());
        assert!(matches!(turning_points_1d(0.1, &p), Err(Error::Unbound(_))));
    }

    #[test]
    fn one_d_operations_reject_angular_momentum() {
        let p = quark().with_angular_momentum(0.3).unwrap();
        assert!(turning_points_1d(1.0, &p).is_err());
    }

    #[test]
    fn turning_points_3d_reference() {
        // 40-digit cubic roots for (Z, λ, L, E) = (0.15, 0.4, 0.3, 1.0).
        let p = quark().with_angular_momentum(0.3).unwrap();
        let tp = turning_points_3d(1.0, &p).unwrap();
        assert_relative_eq!(tp.a, 2.626_468_970_562_737_4, max_relative = 1e-13);
        assert_relative_eq!(tp.b, 0.153_172_014_636_627_47, max_relative = 1e-13);
        assert_relative_eq!(tp.c, -0.279_640_985_199_364_84, max_relative = 1e-13);
        for r in [tp.a, tp.b, tp.c] {
            assert!(radial_radicand_3d(r, 1.0, &p).abs() * r * r < 1e-12);
        }
        let pp = p.with_centrifugal(CentrifugalConvention::Printed);
        let tp = turning_points_3d(1.0, &pp).unwrap();
        assert_relative_eq!(tp.a, 2.610_629_966_553_65, max_relative = 1e-13);
        assert_relative_eq!(tp.b, 0.243_425_441_659_488_02, max_relative = 1e-13);
        assert_relative_eq!(tp.c, -0.354_055_408_213_137_97, max_relative = 1e-13);
    }

    #[test]
    fn turning_points_3d_degenerate_to_1d() {
        let p1 = quark();
        let one_d = turning_points_1d(1.0, &p1).unwrap();
        let p = p1.with_angular_momentum(1e-6).unwrap();
        let tp = turning_points_3d(1.0, &p).unwrap();
        assert!((tp.a - one_d.a).abs() <= 1e-4);
        assert!((tp.c - one_d.c.unwrap()).abs() <= 1e-4);
        assert!(tp.b > 0.0 && tp.b < 1e-10);
    }

    #[test]
    fn circular_orbit_is_discriminant_zero() {
        let p = quark().with_angular_momentum(0.3).unwrap();
        let (ec, rc) = circular_orbit(&p).unwrap();
        // brute-force minimum of the effective potential
        let mut best = (f64::INFINITY, 0.0);
        for i in 1..200_000 {
            let r = i as f64 * 1e-5;
            let v = effective_potential_3d(r, &p);
            if v < best.0 {
                best = (v, r);
            }
        }
        assert!((ec - best.0).abs() < 1e-9);
        assert!((rc - best.1).abs() < 2e-5);
        let tp = turning_points_3d(ec + 1e-12, &p).unwrap();
        assert!((tp.a - tp.b).abs() < 1e-4);
        assert!(matches!(
            turning_points_3d(ec - 1e-3, &p),
            Err(Error::NoBoundOrbit { .. })
        ));
    }
}
