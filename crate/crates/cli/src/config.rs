//! Run configuration: a TOML file with one table per command, overridable
//! from the command line.
//!
//! Physical inputs (`alpha_s`, `lambda_gev2`, `omega` in Hz or eV) need a mass
//! scale, taken from `mass_mev` or a preset; core inputs (`z`, `lambda`,
//! `omega` in natural units) are used as given. Supplying both forms of one
//! quantity is an error rather than a silent choice.

use std::path::Path;

use serde::{Deserialize, Serialize};

use quarkonium_core::chirikov::DEFAULT_THRESHOLD;
use quarkonium_core::dynamics::integrator::DEFAULT_STEPS_PER_ORBIT;
use quarkonium_core::dynamics::section::{
    DEFAULT_CIRCLE_FACTORS, DEFAULT_ESCAPE_FACTOR, DEFAULT_PERIODS, DEFAULT_THETAS_PER_CIRCLE,
};
use quarkonium_core::{CentrifugalConvention, ChirikovConfig, ScanMode, SystemParams, WidthLaw};

use crate::error::{CliError, Result};
use crate::presets::{coulomb_coupling, find_preset, QuarkoniumPreset, TABLE_OMEGA_HZ};
use crate::units::{OmegaUnit, UnitContext};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub system: SystemConfig,
    pub drive: DriveConfig,
    pub critical: CriticalConfig,
    pub scan: ScanConfig,
    pub poincare: PoincareConfig,
    pub action_table: ActionTableConfig,
    pub run: RunConfig,
}

/// Which mass sets the unit conversion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MassConvention {
    /// The quark mass, as listed in the tables.
    #[default]
    Quark,
    /// The reduced mass `m/2` of the pair.
    Reduced,
}

impl MassConvention {
    pub fn factor(self) -> f64 {
        match self {
            MassConvention::Quark => 1.0,
            MassConvention::Reduced => 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass_mev: Option<f64>,
    pub mass_convention: MassConvention,
    /// Strong coupling; sets `Z = 4α_s/3`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_gev2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    pub l: f64,
    pub centrifugal: CentrifugalConvention,
}

/// How `eps_ratio` relates the field to its critical value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioForm {
    /// `ε_cr/ε`, as in the figure captions.
    #[default]
    EpsCrOverEps,
    EpsOverEpsCr,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DriveConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_unit: Option<OmegaUnit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_ratio: Option<f64>,
    pub ratio_form: RatioForm,
    pub phase: f64,
}

impl DriveConfig {
    /// `ε/ε_cr` whatever form the ratio was given in.
    pub fn eps_over_eps_cr(&self) -> Result<Option<f64>> {
        let Some(r) = self.eps_ratio else { return Ok(None) };
        if !(r > 0.0 && r.is_finite()) {
            if r == 0.0 && self.ratio_form == RatioForm::EpsOverEpsCr {
                return Ok(Some(0.0));
            }
            return Err(CliError::config("drive.eps_ratio", format!("{r} must be > 0")));
        }
        Ok(Some(match self.ratio_form {
            RatioForm::EpsCrOverEps => 1.0 / r,
            RatioForm::EpsOverEpsCr => r,
        }))
    }
}

/// Closed form or numeric estimate of the critical field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalMode {
    Hydrogen,
    SmallA,
    LargeA,
    ThreeD,
    Numeric,
}

impl CriticalMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CriticalMode::Hydrogen => "hydrogen",
            CriticalMode::SmallA => "small_a",
            CriticalMode::LargeA => "large_a",
            CriticalMode::ThreeD => "three_d",
            CriticalMode::Numeric => "numeric",
        }
    }
}

impl std::str::FromStr for CriticalMode {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hydrogen" => Ok(CriticalMode::Hydrogen),
            "small_a" => Ok(CriticalMode::SmallA),
            "large_a" => Ok(CriticalMode::LargeA),
            "three_d" => Ok(CriticalMode::ThreeD),
            "numeric" => Ok(CriticalMode::Numeric),
            other => Err(CliError::config(
                "mode",
                format!("unknown mode {other:?} (hydrogen, small_a, large_a, three_d, numeric)"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CriticalConfig {
    pub n: Vec<f64>,
    pub k: u32,
    pub modes: Vec<CriticalMode>,
    pub width_law: WidthLaw,
    pub threshold: f64,
    pub width_prefactor: f64,
}

impl Default for CriticalConfig {
    fn default() -> Self {
        let c = ChirikovConfig::default();
        Self {
            n: vec![5.0, 7.0, 10.0],
            k: 1,
            modes: vec![CriticalMode::SmallA, CriticalMode::LargeA],
            width_law: c.width_law,
            threshold: DEFAULT_THRESHOLD,
            width_prefactor: c.width_prefactor,
        }
    }
}

impl CriticalConfig {
    pub fn chirikov(&self) -> ChirikovConfig {
        ChirikovConfig {
            threshold: self.threshold,
            width_law: self.width_law,
            width_prefactor: self.width_prefactor,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub n_min: f64,
    pub n_max: f64,
    pub points: usize,
    pub log_spacing: bool,
    pub modes: Vec<ScanMode>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            n_min: 1.0,
            n_max: 20.0,
            points: 96,
            log_spacing: true,
            modes: vec![ScanMode::Hydrogen, ScanMode::SmallA, ScanMode::LargeA],
        }
    }
}

impl ScanConfig {
    pub fn grid(&self) -> Result<Vec<f64>> {
        if !(self.n_min > 0.0 && self.n_max > self.n_min && self.n_max.is_finite()) {
            return Err(CliError::config(
                "scan",
                format!("need 0 < n_min < n_max, got [{}, {}]", self.n_min, self.n_max),
            ));
        }
        if self.points < 2 {
            return Err(CliError::config("scan.points", "need at least 2 points"));
        }
        let m = (self.points - 1) as f64;
        Ok((0..self.points)
            .map(|i| {
                let f = i as f64 / m;
                if self.log_spacing {
                    self.n_min * (self.n_max / self.n_min).powf(f)
                } else {
                    self.n_min + (self.n_max - self.n_min) * f
                }
            })
            .collect())
    }
}

/// Figure panels: (a) hydrogen, (b) small orbits, (c) large orbits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Panel {
    A,
    B,
    C,
}

impl Panel {
    pub const ALL: [Panel; 3] = [Panel::A, Panel::B, Panel::C];

    pub fn as_str(self) -> &'static str {
        match self {
            Panel::A => "a",
            Panel::B => "b",
            Panel::C => "c",
        }
    }
}

impl std::str::FromStr for Panel {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" | "hydrogen" => Ok(Panel::A),
            "b" | "small_a" => Ok(Panel::B),
            "c" | "large_a" => Ok(Panel::C),
            other => Err(CliError::config("mode", format!("unknown panel {other:?} (a, b, c)"))),
        }
    }
}

/// `ε_cr/ε` printed in the captions of figures 2, 3 and 4.
pub fn figure_ratio(figure: u8) -> Result<f64> {
    match figure {
        2 => Ok(0.1),
        3 => Ok(0.5),
        4 => Ok(0.9),
        other => Err(CliError::config(
            "poincare.figure",
            format!("no figure {other} (2, 3, 4)"),
        )),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PoincareConfig {
    /// Sets the ratio from a figure caption when `drive.eps_ratio` is absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub figure: Option<u8>,
    pub panels: Vec<Panel>,
    /// Coulomb coupling and confining force of panels b and c (core units).
    pub z: f64,
    pub lambda: f64,
    /// Resonant actions of the three panels.
    pub n_res_hydrogen: f64,
    pub n_res_large_a: f64,
    pub n_res_small_a: f64,
    pub k: u32,
    pub periods: usize,
    pub circle_factors: Vec<f64>,
    pub thetas_per_circle: usize,
    pub steps_per_orbit: usize,
    pub escape_factor: f64,
    /// Also classify every trajectory with the divergence proxy.
    pub chaos: bool,
}

impl Default for PoincareConfig {
    fn default() -> Self {
        Self {
            figure: None,
            panels: Panel::ALL.to_vec(),
            z: 0.15,
            lambda: 0.4,
            n_res_hydrogen: 0.05,
            n_res_large_a: 10.0,
            n_res_small_a: 0.05,
            k: 1,
            periods: DEFAULT_PERIODS,
            circle_factors: DEFAULT_CIRCLE_FACTORS.to_vec(),
            thetas_per_circle: DEFAULT_THETAS_PER_CIRCLE,
            steps_per_orbit: DEFAULT_STEPS_PER_ORBIT,
            escape_factor: DEFAULT_ESCAPE_FACTOR,
            chaos: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ActionTableConfig {
    pub n_min: f64,
    pub n_max: f64,
    pub points: usize,
}

impl Default for ActionTableConfig {
    fn default() -> Self {
        Self {
            n_min: 0.05,
            n_max: 50.0,
            points: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    /// Recorded with every output; the computations themselves are deterministic.
    pub seed: u64,
}

/// The system in core units plus what is needed to convert back.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedSystem {
    pub params: SystemParams,
    pub units: Option<UnitContext>,
    pub preset: Option<QuarkoniumPreset>,
    /// Drive frequency in core units.
    pub omega: Option<f64>,
    /// The frequency as given, before conversion.
    pub omega_input: Option<(f64, OmegaUnit)>,
}

impl ResolvedSystem {
    pub fn require_omega(&self) -> Result<f64> {
        self.omega
            .ok_or_else(|| CliError::config("drive.omega", "a drive frequency is required (--omega)"))
    }
}

fn exclusive<T: Copy>(a: Option<T>, b: Option<T>, names: (&str, &str)) -> Result<()> {
    if a.is_some() && b.is_some() {
        return Err(CliError::config(
            format!("system.{}", names.0),
            format!("give either {} or {}, not both", names.0, names.1),
        ));
    }
    Ok(())
}

impl Config {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| CliError::config("config", e.to_string()))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| CliError::config("config", e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config("config", format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn resolve_system(&self) -> Result<ResolvedSystem> {
        let s = &self.system;
        let preset = s.preset.as_deref().map(find_preset).transpose()?;
        let mass_mev = s.mass_mev.or(preset.map(|p| p.quark_mass_mev));
        let units = mass_mev
            .map(|m| UnitContext::new(m * s.mass_convention.factor()))
            .transpose()?;

        exclusive(s.z, s.alpha_s, ("z", "alpha_s"))?;
        let z = match (s.z, s.alpha_s) {
            (Some(z), _) => z,
            (None, Some(a)) => coulomb_coupling(a),
            (None, None) => match preset {
                Some(p) => p.z(),
                None => return Err(CliError::config("system.z", "no coupling given (z, alpha_s or preset)")),
            },
        };

        exclusive(s.lambda, s.lambda_gev2, ("lambda", "lambda_gev2"))?;
        let lambda_gev2 = s.lambda_gev2.or(if s.lambda.is_none() {
            preset.map(|p| p.lambda_gev2)
        } else {
            None
        });
        let lambda = match (s.lambda, lambda_gev2) {
            (Some(l), _) => l,
            (None, Some(l)) => match units {
                Some(u) => u.lambda_to_core(l),
                None => {
                    return Err(CliError::config(
                        "system.lambda_gev2",
                        "needs a mass scale (mass_mev or preset)",
                    ))
                }
            },
            (None, None) => {
                return Err(CliError::config(
                    "system.lambda",
                    "no confining force given (lambda, lambda_gev2 or preset)",
                ))
            }
        };

        let d = &self.drive;
        let omega_input = match (d.omega, d.omega_unit) {
            (Some(w), Some(unit)) => Some((w, unit)),
            (Some(w), None) if units.is_none() => Some((w, OmegaUnit::Natural)),
            (Some(_), None) => {
                return Err(CliError::config(
                    "drive.omega_unit",
                    "with a physical mass scale the frequency unit must be given (hz, ev, natural)",
                ))
            }
            (None, _) => preset.map(|_| (TABLE_OMEGA_HZ, OmegaUnit::Hz)),
        };
        let omega = match omega_input {
            None => None,
            Some((w, unit)) => {
                if !(w > 0.0 && w.is_finite()) {
                    return Err(CliError::config("drive.omega", format!("{w} must be > 0")));
                }
                match (unit, units) {
                    (OmegaUnit::Natural, _) => Some(w),
                    (_, Some(u)) => Some(u.omega_to_core(w, unit)),
                    (_, None) => {
                        return Err(CliError::config(
                            "drive.omega_unit",
                            format!("{unit} needs a mass scale (mass_mev or preset)"),
                        ))
                    }
                }
            }
        };

        let mut params = SystemParams::new(z, lambda)
            .and_then(|p| p.with_angular_momentum(s.l))
            .map_err(|e| CliError::config("system", e.to_string()))?
            .with_centrifugal(s.centrifugal);
        params.mass_scale_mev = units.map(|u| u.mass_gev * 1e3);
        Ok(ResolvedSystem {
            params,
            units,
            preset,
            omega,
            omega_input,
        })
    }

    /// `ε/ε_cr` for the figure panels, from `drive.eps_ratio` or the figure preset.
    pub fn poincare_eps_over_eps_cr(&self) -> Result<f64> {
        if let Some(r) = self.drive.eps_over_eps_cr()? {
            return Ok(r);
        }
        match self.poincare.figure {
            Some(f) => Ok(1.0 / figure_ratio(f)?),
            None => Err(CliError::config(
                "drive.eps_ratio",
                "give --eps-ratio or poincare.figure (2, 3, 4)",
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn default_round_trip() {
        let c = Config::default();
        assert_eq!(Config::from_toml_str(&c.to_toml_string().unwrap()).unwrap(), c);
    }

    #[test]
    fn preset_resolves_table_parameters() {
        let c = Config::from_toml_str("[system]\npreset = \"cc\"\n").unwrap();
        let r = c.resolve_system().unwrap();
        assert_relative_eq!(r.params.z, 4.0 * 0.112 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(r.params.lambda, 0.2 / 0.09, max_relative = 1e-12);
        assert_eq!(r.omega_input, Some((1e9, OmegaUnit::Hz)));
        assert_relative_eq!(
            r.omega.unwrap(),
            1e9 * crate::units::HBAR_GEV_S / 0.3,
            max_relative = 1e-12
        );
    }

    #[test]
    fn conflicting_inputs_are_rejected() {
        for text in [
            "[system]\nz = 0.1\nalpha_s = 0.1\nlambda = 1.0\n",
            "[system]\nz = 0.1\nlambda = 1.0\nlambda_gev2 = 0.2\nmass_mev = 300.0\n",
            "[system]\nz = 0.1\nlambda_gev2 = 0.2\n",
            "[system]\npreset = \"cc\"\n[drive]\nomega = 2.0\n",
            "[system]\nz = 0.1\nlambda = 1.0\n[drive]\nomega = 2.0\nomega_unit = \"hz\"\n",
        ] {
            let err = Config::from_toml_str(text).unwrap().resolve_system().unwrap_err();
            assert_eq!(err.exit_code(), 1, "{text}: {err}");
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(Config::from_toml_str("[system]\nzz = 1.0\n").is_err());
    }

    #[test]
    fn ratio_forms() {
        let mut d = DriveConfig {
            eps_ratio: Some(0.1),
            ..Default::default()
        };
        assert_relative_eq!(d.eps_over_eps_cr().unwrap().unwrap(), 10.0);
        d.ratio_form = RatioForm::EpsOverEpsCr;
        assert_relative_eq!(d.eps_over_eps_cr().unwrap().unwrap(), 0.1);
    }

    #[test]
    fn scan_grid_spans_the_range() {
        let g = ScanConfig::default().grid().unwrap();
        assert_eq!(g.len(), 96);
        assert_relative_eq!(g[0], 1.0);
        assert_relative_eq!(g[95], 20.0, max_relative = 1e-14);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }
}
