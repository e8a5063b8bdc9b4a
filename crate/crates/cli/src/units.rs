//! Conversion between the unit-mass core and physical units.
//!
//! With `H = p²/2m − Z/x + λx + εx cos ωt` in natural units (ħ = c = 1,
//! energies in GeV), the substitution `x̃ = m x`, `t̃ = m t` gives the unit-mass
//! Hamiltonian `H̃ = H/m` with
//!
//! ```text
//! Z̃ = Z,   λ̃ = λ/m²,   ε̃ = ε/m²,   ω̃ = ω/m,   ñ = n.
//! ```
//!
//! A field of 1 GeV² is 1 GeV per GeV⁻¹ = (1/ħc) GeV/fm, which for a unit
//! charge is 5.0677·10⁹ V/fm.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const HBAR_C_GEV_FM: f64 = 0.197327;
pub const HBAR_GEV_S: f64 = 6.582_119_569e-25;
const VOLT_PER_GEV: f64 = 1e9;

/// How a drive frequency given on the command line is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OmegaUnit {
    /// Angular frequency in s⁻¹, converted with ħ.
    #[default]
    Hz,
    /// Photon energy ħω in eV.
    Ev,
    /// Already in the unit-mass core units.
    Natural,
}

impl OmegaUnit {
    pub const ALL: [OmegaUnit; 3] = [OmegaUnit::Hz, OmegaUnit::Ev, OmegaUnit::Natural];

    pub fn as_str(self) -> &'static str {
        match self {
            OmegaUnit::Hz => "hz",
            OmegaUnit::Ev => "ev",
            OmegaUnit::Natural => "natural",
        }
    }
}

impl fmt::Display for OmegaUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OmegaUnit {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hz" => Ok(OmegaUnit::Hz),
            "ev" => Ok(OmegaUnit::Ev),
            "natural" => Ok(OmegaUnit::Natural),
            other => Err(CliError::config(
                "omega_unit",
                format!("unknown unit {other:?} (hz, ev, natural)"),
            )),
        }
    }
}

/// Mass scale and constants of one unit conversion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitContext {
    pub hbar_c_gev_fm: f64,
    pub mass_gev: f64,
}

impl UnitContext {
    pub fn new(mass_mev: f64) -> Result<Self> {
        if !(mass_mev > 0.0 && mass_mev.is_finite()) {
            return Err(CliError::config("mass_mev", format!("{mass_mev} must be > 0")));
        }
        Ok(Self {
            hbar_c_gev_fm: HBAR_C_GEV_FM,
            mass_gev: mass_mev * 1e-3,
        })
    }

    /// V/fm per GeV² for a unit charge.
    pub fn volts_per_fm_per_gev2(&self) -> f64 {
        VOLT_PER_GEV / self.hbar_c_gev_fm
    }

    pub fn gev2_to_v_per_fm(&self, field: f64) -> f64 {
        field * self.volts_per_fm_per_gev2()
    }

    pub fn v_per_fm_to_gev2(&self, field: f64) -> f64 {
        field / self.volts_per_fm_per_gev2()
    }

    pub fn field_from_core(&self, eps: f64) -> f64 {
        eps * self.mass_gev * self.mass_gev
    }

    pub fn field_to_core(&self, eps_gev2: f64) -> f64 {
        eps_gev2 / (self.mass_gev * self.mass_gev)
    }

    /// Core field straight to V/fm.
    pub fn core_field_to_v_per_fm(&self, eps: f64) -> f64 {
        self.gev2_to_v_per_fm(self.field_from_core(eps))
    }

    pub fn v_per_fm_to_core_field(&self, field: f64) -> f64 {
        self.field_to_core(self.v_per_fm_to_gev2(field))
    }

    pub fn lambda_to_core(&self, lambda_gev2: f64) -> f64 {
        lambda_gev2 / (self.mass_gev * self.mass_gev)
    }

    pub fn lambda_from_core(&self, lambda: f64) -> f64 {
        lambda * self.mass_gev * self.mass_gev
    }

    pub fn omega_to_core(&self, value: f64, unit: OmegaUnit) -> f64 {
        match unit {
            OmegaUnit::Hz => value * HBAR_GEV_S / self.mass_gev,
            OmegaUnit::Ev => value * 1e-9 / self.mass_gev,
            OmegaUnit::Natural => value,
        }
    }

    pub fn omega_from_core(&self, omega: f64, unit: OmegaUnit) -> f64 {
        match unit {
            OmegaUnit::Hz => omega * self.mass_gev / HBAR_GEV_S,
            OmegaUnit::Ev => omega * self.mass_gev * 1e9,
            OmegaUnit::Natural => omega,
        }
    }

    pub fn length_to_fm(&self, x: f64) -> f64 {
        x / self.mass_gev * self.hbar_c_gev_fm
    }

    pub fn energy_to_gev(&self, h: f64) -> f64 {
        h * self.mass_gev
    }

    /// Human-readable steps from a core field to V/fm.
    pub fn field_chain(&self, eps: f64) -> String {
        let gev2 = self.field_from_core(eps);
        format!(
            "ε̃ = {eps:.6e} → ε = m²ε̃ = ({m:.6} GeV)²·{eps:.6e} = {gev2:.6e} GeV² → ε/ħc = {gevfm:.6e} GeV/fm → {vfm:.6e} V/fm",
            m = self.mass_gev,
            gevfm = gev2 / self.hbar_c_gev_fm,
            vfm = self.gev2_to_v_per_fm(gev2),
        )
    }
}
