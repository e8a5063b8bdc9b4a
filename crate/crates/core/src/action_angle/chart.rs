//! Tabulated, invertible map between energy and action.
//!
//! Nodes are log-spaced in the outer turning point `a`, where `E = λa − Z/a`
//! is exact. Both `ln n` and `ln ω₀` are interpolated against `ln a` by cubic
//! Hermite segments with the exact node derivatives
//! `d ln n/d ln a = a(λ + Z/a²)/(ω₀ n)` and `d ln ω₀/d ln a = (dω₀/dn)(dn/da)(a/ω₀)`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{turning_points_1d, SystemParams};
use crate::roots::brent;

use super::exact::{
    action_from_turning_point, energy_at_turning_point, energy_of_action, omega0_prime_exact, period_from_turning_point,
};

pub const DEFAULT_CHART_NODES: usize = 256;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ChartRow {
    #[serde(rename = "E")]
    energy: f64,
    n: f64,
    omega0: f64,
    a: f64,
    domega0_dn: f64,
}

/// Immutable `E ↔ n` chart with frequency accessors.
#[derive(Debug, Clone)]
pub struct ActionAngleChart {
    params: SystemParams,
    ln_a: Vec<f64>,
    energy: Vec<f64>,
    action: Vec<f64>,
    omega0: Vec<f64>,
    domega0_dn: Vec<f64>,
    ln_n: Vec<f64>,
    ln_w: Vec<f64>,
    dln_n: Vec<f64>,
    dln_w: Vec<f64>,
}

fn hermite(h: f64, t: f64, y0: f64, y1: f64, d0: f64, d1: f64) -> (f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    let value = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
    let dh00 = 6.0 * t2 - 6.0 * t;
    let dh10 = 3.0 * t2 - 4.0 * t + 1.0;
    let dh01 = -dh00;
    let dh11 = 3.0 * t2 - 2.0 * t;
    let slope = (dh00 * y0 + dh01 * y1) / h + dh10 * d0 + dh11 * d1;
    (value, slope)
}

impl ActionAngleChart {
    /// Builds a chart with `nodes` turning points log-spaced over `[a_min, a_max]`.
    pub fn new(p: &SystemParams, a_min: f64, a_max: f64, nodes: usize) -> Result<Self> {
        p.require_1d("ActionAngleChart")?;
        if !(a_min > 0.0 && a_max > a_min && a_max.is_finite()) {
            return Err(Error::domain(
                "ActionAngleChart",
                format!("invalid turning-point range [{a_min}, {a_max}]"),
            ));
        }
        if nodes < 4 {
            return Err(Error::InsufficientData { needed: 4, got: nodes });
        }
        let (l0, l1) = (a_min.ln(), a_max.ln());
        let mut rows = Vec::with_capacity(nodes);
        for i in 0..nodes {
            let a = if i == nodes - 1 {
                a_max
            } else {
                (l0 + (l1 - l0) * i as f64 / (nodes - 1) as f64).exp()
            };
            let energy = energy_at_turning_point(a, p);
            let n = action_from_turning_point(a, p)?;
            let omega0 = std::f64::consts::TAU / period_from_turning_point(a, p)?;
            let domega0_dn = omega0_prime_exact(energy, p)?;
            rows.push(ChartRow {
                energy,
                n,
                omega0,
                a,
                domega0_dn,
            });
        }
        Self::from_rows(p, rows)
    }

    /// Chart covering the energies `[e_min, e_max]`.
    pub fn from_energy_range(p: &SystemParams, e_min: f64, e_max: f64, nodes: usize) -> Result<Self> {
        let a0 = turning_points_1d(e_min, p)?.a;
        let a1 = turning_points_1d(e_max, p)?.a;
        Self::new(p, a0, a1, nodes)
    }

    /// Chart covering the actions `[n_min, n_max]`.
    pub fn from_action_range(p: &SystemParams, n_min: f64, n_max: f64, nodes: usize) -> Result<Self> {
        Self::from_energy_range(p, energy_of_action(n_min, p)?, energy_of_action(n_max, p)?, nodes)
    }

    fn from_rows(p: &SystemParams, rows: Vec<ChartRow>) -> Result<Self> {
        if rows.len() < 4 {
            return Err(Error::InsufficientData {
                needed: 4,
                got: rows.len(),
            });
        }
        for w in rows.windows(2) {
            if !(w[1].a > w[0].a && w[1].n > w[0].n && w[1].energy > w[0].energy) {
                return Err(Error::domain(
                    "ActionAngleChart",
                    "chart nodes are not strictly increasing",
                ));
            }
        }
        if rows.iter().any(|r| !(r.omega0 > 0.0)) {
            return Err(Error::domain("ActionAngleChart", "non-positive frequency on the grid"));
        }
        let mut c = Self {
            params: *p,
            ln_a: Vec::with_capacity(rows.len()),
            energy: Vec::with_capacity(rows.len()),
            action: Vec::with_capacity(rows.len()),
            omega0: Vec::with_capacity(rows.len()),
            domega0_dn: Vec::with_capacity(rows.len()),
            ln_n: Vec::with_capacity(rows.len()),
            ln_w: Vec::with_capacity(rows.len()),
            dln_n: Vec::with_capacity(rows.len()),
            dln_w: Vec::with_capacity(rows.len()),
        };
        for r in rows {
            let dn_da = (p.lambda + p.z / (r.a * r.a)) / r.omega0;
            c.ln_a.push(r.a.ln());
            c.energy.push(r.energy);
            c.action.push(r.n);
            c.omega0.push(r.omega0);
            c.domega0_dn.push(r.domega0_dn);
            c.ln_n.push(r.n.ln());
            c.ln_w.push(r.omega0.ln());
            c.dln_n.push(r.a * dn_da / r.n);
            c.dln_w.push(r.a * dn_da * r.domega0_dn / r.omega0);
        }
        Ok(c)
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.ln_a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ln_a.is_empty()
    }

    pub fn energy_range(&self) -> (f64, f64) {
        (self.energy[0], self.energy[self.len() - 1])
    }

    pub fn action_range(&self) -> (f64, f64) {
        (self.action[0], self.action[self.len() - 1])
    }

    /// Frequencies at the two ends of the chart, `(ω₀(n_min), ω₀(n_max))`.
    pub fn omega0_range(&self) -> (f64, f64) {
        (self.omega0[0], self.omega0[self.len() - 1])
    }

    /// Node values `(E, n, ω₀)`.
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        (0..self.len()).map(|i| (self.energy[i], self.action[i], self.omega0[i]))
    }

    fn segment(&self, ln_a: f64) -> usize {
        let i = self.ln_a.partition_point(|&v| v <= ln_a);
        i.clamp(1, self.len() - 1) - 1
    }

    fn eval(&self, ln_a: f64, y: &[f64], d: &[f64]) -> (f64, f64) {
        let i = self.segment(ln_a);
        let h = self.ln_a[i + 1] - self.ln_a[i];
        hermite(h, (ln_a - self.ln_a[i]) / h, y[i], y[i + 1], d[i], d[i + 1])
    }

    fn ln_a_of_energy(&self, energy: f64) -> Result<f64> {
        let (lo, hi) = self.energy_range();
        let tol = 1e-12 * energy.abs().max(1.0);
        if !(energy >= lo - tol && energy <= hi + tol) {
            return Err(Error::OutOfRange {
                quantity: "E",
                value: energy,
                min: lo,
                max: hi,
            });
        }
        let a = turning_points_1d(energy, &self.params)?.a;
        Ok(a.ln().clamp(self.ln_a[0], self.ln_a[self.len() - 1]))
    }

    fn ln_a_of_action(&self, n: f64) -> Result<f64> {
        let (lo, hi) = self.action_range();
        if !(n >= lo * (1.0 - 1e-12) && n <= hi * (1.0 + 1e-12)) {
            return Err(Error::OutOfRange {
                quantity: "n",
                value: n,
                min: lo,
                max: hi,
            });
        }
        let target = n.clamp(lo, hi).ln();
        let i = self.action.partition_point(|&v| v <= n).clamp(1, self.len() - 1) - 1;
        let (x0, x1) = (self.ln_a[i], self.ln_a[i + 1]);
        let h = x1 - x0;
        let f = |x: f64| {
            hermite(
                h,
                (x - x0) / h,
                self.ln_n[i],
                self.ln_n[i + 1],
                self.dln_n[i],
                self.dln_n[i + 1],
            )
            .0 - target
        };
        if f(x0) >= 0.0 {
            return Ok(x0);
        }
        if f(x1) <= 0.0 {
            return Ok(x1);
        }
        brent("chart inverse", f, x0, x1, 1e-15)
    }

    /// `n(E)`.
    pub fn action(&self, energy: f64) -> Result<f64> {
        let la = self.ln_a_of_energy(energy)?;
        Ok(self.eval(la, &self.ln_n, &self.dln_n).0.exp())
    }

    /// `E(n)`, the exact inverse of [`action`](Self::action).
    pub fn energy(&self, n: f64) -> Result<f64> {
        let a = self.ln_a_of_action(n)?.exp();
        Ok(energy_at_turning_point(a, &self.params))
    }

    /// Outer turning point of the orbit with action `n`.
    pub fn turning_point(&self, n: f64) -> Result<f64> {
        Ok(self.ln_a_of_action(n)?.exp())
    }

    /// `ω₀(E)`.
    pub fn omega0(&self, energy: f64) -> Result<f64> {
        let la = self.ln_a_of_energy(energy)?;
        Ok(self.eval(la, &self.ln_w, &self.dln_w).0.exp())
    }

    /// `ω₀(n)`.
    pub fn omega0_at_action(&self, n: f64) -> Result<f64> {
        let la = self.ln_a_of_action(n)?;
        Ok(self.eval(la, &self.ln_w, &self.dln_w).0.exp())
    }

    /// `dω₀/dn` at action `n`.
    pub fn omega0_prime_at_action(&self, n: f64) -> Result<f64> {
        let la = self.ln_a_of_action(n)?;
        let (lw, dw) = self.eval(la, &self.ln_w, &self.dln_w);
        let (ln_n, dn) = self.eval(la, &self.ln_n, &self.dln_n);
        Ok(lw.exp() * dw / (ln_n.exp() * dn))
    }

    /// Writes the nodes as CSV with columns `E, n, omega0, a, domega0_dn`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        for i in 0..self.len() {
            wr.serialize(ChartRow {
                energy: self.energy[i],
                n: self.action[i],
                omega0: self.omega0[i],
                a: self.ln_a[i].exp(),
                domega0_dn: self.domega0_dn[i],
            })?;
        }
        wr.flush()?;
        Ok(())
    }

    /// Reads a chart written by [`write_csv`](Self::write_csv).
    pub fn read_csv<R: Read>(p: &SystemParams, r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let rows = rd.deserialize().collect::<std::result::Result<Vec<ChartRow>, _>>()?;
        Self::from_rows(p, rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action_angle::{action_1d_quadrature, omega0_exact};
    use approx::assert_relative_eq;

    fn chart() -> ActionAngleChart {
        let p = SystemParams::new(0.15, 0.4).unwrap();
        ActionAngleChart::from_action_range(&p, 0.05, 40.0, DEFAULT_CHART_NODES).unwrap()
    }

    #[test]
    fn round_trip_at_midpoints() {
        let c = chart();
        for i in 0..c.len() - 1 {
            let e = 0.5 * (c.energy[i] + c.energy[i + 1]);
            let back = c.energy(c.action(e).unwrap()).unwrap();
            assert!((back - e).abs() <= 1e-9 * e.abs().max(1.0));
        }
    }

    #[test]
    fn interpolation_matches_exact_values() {
        let c = chart();
        let p = *c.params();
        for i in (0..c.len() - 1).step_by(17) {
            let e = 0.5 * (c.energy[i] + c.energy[i + 1]);
            assert_relative_eq!(
                c.action(e).unwrap(),
                action_1d_quadrature(e, &p).unwrap(),
                max_relative = 1e-8
            );
            assert_relative_eq!(c.omega0(e).unwrap(), omega0_exact(e, &p).unwrap(), max_relative = 1e-8);
            let n = c.action(e).unwrap();
            assert_relative_eq!(
                c.omega0_prime_at_action(n).unwrap(),
                omega0_prime_exact(e, &p).unwrap(),
                max_relative = 1e-6
            );
        }
    }

    #[test]
    fn monotone_and_positive() {
        let c = chart();
        assert!(c.action.windows(2).all(|w| w[1] > w[0]));
        assert!(c.omega0.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn out_of_range() {
        let c = chart();
        assert!(matches!(c.energy(100.0), Err(Error::OutOfRange { .. })));
        assert!(matches!(c.action(1e6), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn csv_round_trip() {
        let c = chart();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let header = std::str::from_utf8(&buf).unwrap().lines().next().unwrap().to_owned();
        assert_eq!(header, "E,n,omega0,a,domega0_dn");
        let back = ActionAngleChart::read_csv(c.params(), buf.as_slice()).unwrap();
        for e in [-1.0, 0.3, 4.0] {
            assert_relative_eq!(back.action(e).unwrap(), c.action(e).unwrap(), max_relative = 1e-14);
        }
    }

    #[test]
    fn hydrogen_chart() {
        let p = SystemParams::hydrogen(1.0).unwrap();
        let c = ActionAngleChart::from_action_range(&p, 0.5, 20.0, 64).unwrap();
        for &n in &[0.7, 1.0, 3.3, 17.0] {
            assert_relative_eq!(c.energy(n).unwrap(), -0.5 / (n * n), max_relative = 1e-9);
            assert_relative_eq!(c.omega0_at_action(n).unwrap(), 1.0 / n.powi(3), max_relative = 1e-9);
            assert_relative_eq!(
                c.omega0_prime_at_action(n).unwrap(),
                -3.0 / n.powi(4),
                max_relative = 1e-7
            );
        }
    }
}
