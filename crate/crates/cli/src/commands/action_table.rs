//! Dump of the action-angle chart with closed-form and asymptotic columns.

use serde::Serialize;

use quarkonium_core::action_angle::{
    action_1d_closed, action_1d_quadrature, energy_of_action, h0_large_a, h0_small_a, omega0_exact, omega0_large_a,
    omega0_small_a, Regime, RegimeGates,
};
use quarkonium_core::potential::turning_points_1d;

use crate::config::Config;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActionRow {
    pub n: f64,
    pub energy: f64,
    pub omega0: f64,
    pub a: f64,
    pub regime: Regime,
    /// Definitional quadrature at `energy`.
    pub n_quadrature: f64,
    /// Elliptic closed form with its convention constant.
    pub n_closed: Option<f64>,
    pub closed_rel_delta: Option<f64>,
    pub h0_small_a: Option<f64>,
    pub h0_large_a: Option<f64>,
    pub omega0_small_a: Option<f64>,
    pub omega0_large_a: Option<f64>,
    /// Hydrogen only: `Z/√(−2E)` and `Z²/n³`.
    pub n_kepler: Option<f64>,
    pub omega0_kepler: Option<f64>,
}

pub fn action_table(cfg: &Config) -> Result<Vec<ActionRow>> {
    let p = cfg.resolve_system()?.params;
    let t = &cfg.action_table;
    if !(t.n_min > 0.0 && t.n_max > t.n_min) || t.points < 2 {
        return Err(CliError::config(
            "action_table",
            "need 0 < n_min < n_max and at least 2 points",
        ));
    }
    let gates = RegimeGates::default();
    let quark = p.lambda > 0.0;
    (0..t.points)
        .map(|i| {
            let n = t.n_min * (t.n_max / t.n_min).powf(i as f64 / (t.points - 1) as f64);
            let energy = energy_of_action(n, &p)?;
            let a = turning_points_1d(energy, &p)?.a;
            let n_quadrature = action_1d_quadrature(energy, &p)?;
            let n_closed = if quark {
                Some(action_1d_closed(energy, &p)?)
            } else {
                None
            };
            let (n_kepler, omega0_kepler) = if quark {
                (None, None)
            } else {
                let nk = p.z / (-2.0 * energy).sqrt();
                (Some(nk), Some(p.z * p.z / nk.powi(3)))
            };
            Ok(ActionRow {
                n,
                energy,
                omega0: omega0_exact(energy, &p)?,
                a,
                regime: gates.classify(a, &p),
                n_quadrature,
                n_closed,
                closed_rel_delta: n_closed.map(|c| c / n_quadrature - 1.0),
                h0_small_a: quark.then(|| h0_small_a(n, &p)),
                h0_large_a: quark.then(|| h0_large_a(n, &p)),
                omega0_small_a: quark.then(|| omega0_small_a(n, &p)),
                omega0_large_a: quark.then(|| omega0_large_a(n, &p)),
                n_kepler,
                omega0_kepler,
            })
        })
        .collect()
}

pub fn write_action_csv<W: std::io::Write>(rows: &[ActionRow], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record([
        "n",
        "E",
        "omega0",
        "a",
        "regime",
        "n_quadrature",
        "n_closed",
        "closed_rel_delta",
        "h0_small_a",
        "h0_large_a",
        "omega0_small_a",
        "omega0_large_a",
        "n_kepler",
        "omega0_kepler",
    ])?;
    let opt = crate::sidecar::opt_num;
    for r in rows {
        let regime = match r.regime {
            Regime::SmallA => "small_a",
            Regime::Intermediate => "intermediate",
            Regime::LargeA => "large_a",
        };
        wr.write_record([
            crate::sidecar::num(r.n),
            crate::sidecar::num(r.energy),
            crate::sidecar::num(r.omega0),
            crate::sidecar::num(r.a),
            regime.to_string(),
            crate::sidecar::num(r.n_quadrature),
            opt(r.n_closed),
            opt(r.closed_rel_delta),
            opt(r.h0_small_a),
            opt(r.h0_large_a),
            opt(r.omega0_small_a),
            opt(r.omega0_large_a),
            opt(r.n_kepler),
            opt(r.omega0_kepler),
        ])?;
    }
    wr.flush()?;
    Ok(())
}
