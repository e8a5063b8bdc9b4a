//! Resonance bookkeeping and critical-field estimates.
//!
//! A drive `εx cos ωt` couples to the orbit through `ε x_k cos(kθ − ωt)`. The
//! `k`-th resonance sits where `k ω₀(n_k) = ω`, and its half-width in action is
//! `2√(ε|x_k|/|ω₀′|)` (pendulum separatrix). Adjacent resonances overlap when
//! `(Δn_k + Δn_{k+1}) / δn > threshold`, where the frequency spacing
//! `ω/(k(k+1))` is converted to an action spacing `δn` with `|ω₀′|` at the
//! midpoint of the pair.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::action_angle::asymptotic::sin2_over_lambda;
use crate::action_angle::fourier::DEFAULT_ORBIT_SAMPLES;
use crate::action_angle::{
    energy_of_action, fourier_at_energy, ActionAngleChart, AsymptoticConstants, FourierAmplitudes, Regime, RegimeGates,
};
use crate::error::{Error, Result};
use crate::potential::SystemParams;
use crate::roots::brent;

/// Overlap threshold used by the closed-form estimates.
pub const DEFAULT_THRESHOLD: f64 = 2.5;

/// How a resonance width is computed from `ε`, `x_k` and `ω₀′`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WidthLaw {
    /// `prefactor·√(ε|x_k|/|ω₀′|)`.
    #[default]
    SquareRoot,
    /// `ε|x_k|/|ω₀′|`, the unrooted form as printed.
    Printed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChirikovConfig {
    pub threshold: f64,
    pub width_law: WidthLaw,
    pub width_prefactor: f64,
}

impl Default for ChirikovConfig {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_THRESHOLD,
            width_law: WidthLaw::SquareRoot,
            width_prefactor: 2.0,
        }
    }
}

/// A `k:1` resonance, `k ω₀(n_k) = ω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    pub k: u32,
    pub n_k: f64,
    pub omega0: f64,
    /// `dω₀/dn` at `n_k`.
    pub omega0_prime: f64,
}

/// Every `k:1` resonance inside the chart for `k` in `ks`, sorted by `k`
/// and then by action. An empty list is not an error.
pub fn resonance_locations(
    omega: f64,
    ks: std::ops::RangeInclusive<u32>,
    chart: &ActionAngleChart,
) -> Result<Vec<Resonance>> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::domain("resonance_locations", format!("ω = {omega} must be > 0")));
    }
    let nodes: Vec<(f64, f64)> = chart.nodes().map(|(_, n, w)| (n, w.ln())).collect();
    let (k_lo, k_hi) = ((*ks.start()).max(1), *ks.end());
    let mut out: Vec<Resonance> = Vec::new();
    for w in nodes.windows(2) {
        let (lo, hi) = if w[0].1 <= w[1].1 {
            (w[0].1, w[1].1)
        } else {
            (w[1].1, w[0].1)
        };
        // k with ω/k inside [e^lo, e^hi]
        let first = (omega.ln() - hi).exp().ceil().max(f64::from(k_lo));
        let last = (omega.ln() - lo).exp().floor().min(f64::from(k_hi));
        if first > last {
            continue;
        }
        for k in first as u32..=last as u32 {
            let target = (omega / f64::from(k)).ln();
            let f = |n: f64| chart.omega0_at_action(n).map(f64::ln).unwrap_or(f64::NAN) - target;
            let n_k = brent("resonance_locations", f, w[0].0, w[1].0, 1e-14 * w[1].0)?;
            if out.iter().any(|r| r.k == k && (r.n_k - n_k).abs() <= 1e-12 * n_k) {
                continue;
            }
            out.push(Resonance {
                k,
                n_k,
                omega0: chart.omega0_at_action(n_k)?,
                omega0_prime: chart.omega0_prime_at_action(n_k)?,
            });
        }
    }
    out.sort_by(|a, b| a.k.cmp(&b.k).then(a.n_k.total_cmp(&b.n_k)));
    if out.is_empty() {
        log::info!("no resonance for ω = {omega} inside the chart");
    }
    Ok(out)
}

/// Half-width in action of a resonance with amplitude `x_k`.
pub fn width_from_amplitude(epsilon: f64, x_k: f64, res: &Resonance, cfg: &ChirikovConfig) -> Result<f64> {
    if !(epsilon >= 0.0) {
        return Err(Error::domain("resonance_width", format!("ε = {epsilon} must be ≥ 0")));
    }
    if res.omega0_prime == 0.0 || !res.omega0_prime.is_finite() {
        return Err(Error::DegenerateResonance {
            k: res.k,
            action: res.n_k,
        });
    }
    let s = epsilon * x_k.abs() / res.omega0_prime.abs();
    Ok(match cfg.width_law {
        WidthLaw::SquareRoot => cfg.width_prefactor * s.sqrt(),
        WidthLaw::Printed => s,
    })
}

/// Half-width of `res` using the orbit amplitudes `amps` (taken at `n_k`).
pub fn resonance_width(epsilon: f64, res: &Resonance, amps: &FourierAmplitudes, cfg: &ChirikovConfig) -> Result<f64> {
    let x_k = amps.x_k(res.k as usize).ok_or(Error::InsufficientData {
        needed: res.k as usize,
        got: amps.k_max(),
    })?;
    width_from_amplitude(epsilon, x_k, res, cfg)
}

/// Adjacent resonances `k` and `k + 1` with everything the overlap ratio needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ResonancePair {
    pub omega: f64,
    pub lower: Resonance,
    pub upper: Resonance,
    pub x_lower: f64,
    pub x_upper: f64,
    /// `|ω₀′|` at the midpoint of the two resonant actions.
    pub omega0_prime_mid: f64,
}

impl ResonancePair {
    /// Locates resonances `k` and `k + 1` for drive frequency `omega`. When
    /// several solutions exist for one `k`, the pair closest in action wins.
    pub fn new(omega: f64, k: u32, chart: &ActionAngleChart) -> Result<Self> {
        let all = resonance_locations(omega, k..=k + 1, chart)?;
        let lows: Vec<_> = all.iter().filter(|r| r.k == k).collect();
        let highs: Vec<_> = all.iter().filter(|r| r.k == k + 1).collect();
        let mut best: Option<(Resonance, Resonance)> = None;
        for l in &lows {
            for h in &highs {
                let gap = (h.n_k - l.n_k).abs();
                if best.is_none_or(|(bl, bh)| gap < (bh.n_k - bl.n_k).abs()) {
                    best = Some((**l, **h));
                }
            }
        }
        let (lower, upper) =
            best.ok_or_else(|| Error::NoResonance(format!("resonances {k} and {} not both inside the chart", k + 1)))?;
        let p = chart.params();
        let amp = |r: &Resonance| -> Result<f64> {
            let e = chart.energy(r.n_k)?;
            Ok(fourier_at_energy(e, r.k as usize, p, DEFAULT_ORBIT_SAMPLES)?
                .x_k(r.k as usize)
                .unwrap_or(0.0))
        };
        let mid = 0.5 * (lower.n_k + upper.n_k);
        Ok(Self {
            omega,
            x_lower: amp(&lower)?,
            x_upper: amp(&upper)?,
            omega0_prime_mid: chart.omega0_prime_at_action(mid)?.abs(),
            lower,
            upper,
        })
    }

    pub fn k(&self) -> u32 {
        self.lower.k
    }

    /// `ω/(k(k+1))` converted to action with `|ω₀′|` at the midpoint.
    pub fn action_spacing(&self) -> f64 {
        let k = f64::from(self.lower.k);
        self.omega / (k * (k + 1.0)) / self.omega0_prime_mid
    }

    /// `(Δn_k + Δn_{k+1}) / δn`.
    pub fn ratio(&self, epsilon: f64, cfg: &ChirikovConfig) -> Result<f64> {
        let w = width_from_amplitude(epsilon, self.x_lower, &self.lower, cfg)?
            + width_from_amplitude(epsilon, self.x_upper, &self.upper, cfg)?;
        Ok(w / self.action_spacing())
    }
}

/// Overlap ratio of resonances `k` and `k + 1` at field `epsilon`.
pub fn overlap_ratio(epsilon: f64, k: u32, omega: f64, chart: &ActionAngleChart, cfg: &ChirikovConfig) -> Result<f64> {
    ResonancePair::new(omega, k, chart)?.ratio(epsilon, cfg)
}

/// Which formula produced a critical field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalRegime {
    SmallA,
    LargeA,
    ThreeD,
    Numeric,
    Hydrogen,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalFieldInputs {
    pub n: f64,
    pub omega: f64,
    pub z: f64,
    pub lambda: f64,
    pub l: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalFieldResult {
    pub epsilon_cr: f64,
    pub k_pair: (u32, u32),
    pub regime: CriticalRegime,
    /// Whether the inputs satisfy the validity gate of the formula.
    pub regime_gate_ok: bool,
    pub inputs: CriticalFieldInputs,
}

fn check_inputs(op: &'static str, n: f64, k: u32, omega: f64) -> Result<()> {
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::domain(op, format!("n = {n} must be > 0")));
    }
    if k == 0 {
        return Err(Error::domain(op, "k must be ≥ 1"));
    }
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::domain(op, format!("ω = {omega} must be > 0")));
    }
    Ok(())
}

fn gate_1d(n: f64, p: &SystemParams, gates: &RegimeGates, want: Regime) -> bool {
    match energy_of_action(n, p).and_then(|e| crate::potential::turning_points_1d(e, p)) {
        Ok(tp) => {
            let ok = gates.classify(tp.a, p) == want;
            if !ok {
                log::debug!("n = {n} is outside the {want:?} regime");
            }
            ok
        }
        Err(_) => false,
    }
}

fn result(
    epsilon_cr: f64,
    k: u32,
    regime: CriticalRegime,
    regime_gate_ok: bool,
    n: f64,
    omega: f64,
    p: &SystemParams,
) -> CriticalFieldResult {
    CriticalFieldResult {
        epsilon_cr,
        k_pair: (k, k + 1),
        regime,
        regime_gate_ok,
        inputs: CriticalFieldInputs {
            n,
            omega,
            z: p.z,
            lambda: p.lambda,
            l: p.l,
        },
    }
}

/// Large-orbit estimate
/// `ε = 0.07 Z² ω π² λ / n² · k(k+1)/((k+1)² + k²) · {1 + λ/(A² n^{4/3}) [5 ln(4Aλ^{-1/2} n^{2/3}) − 7]}`.
pub fn epsilon_cr_large_a(
    n: f64,
    k: u32,
    omega: f64,
    p: &SystemParams,
    gates: &RegimeGates,
) -> Result<CriticalFieldResult> {
    check_inputs("epsilon_cr_large_a", n, k, omega)?;
    if p.lambda <= 0.0 {
        return Err(Error::domain("epsilon_cr_large_a", "requires λ > 0"));
    }
    let a = AsymptoticConstants::new(p.lambda).a();
    let kf = f64::from(k);
    let k_factor = kf * (kf + 1.0) / ((kf + 1.0).powi(2) + kf * kf);
    let log = (4.0 * a / p.lambda.sqrt() * n.powf(2.0 / 3.0)).ln();
    let correction = 1.0 + p.lambda / (a * a * n.powf(4.0 / 3.0)) * (5.0 * log - 7.0);
    let eps = 0.07 * p.z * p.z * omega * PI * PI * p.lambda / (n * n) * k_factor * correction;
    let gate = gate_1d(n, p, gates, Regime::LargeA);
    Ok(result(eps, k, CriticalRegime::LargeA, gate, n, omega, p))
}

/// Small-orbit estimate
/// `ε = 0.3 ω λ / (k(k+1) n²) · (29λn⁴ − 9)/(29λn⁴ − 3) · [sin²(k√λ π/2)/k + sin²((k+1)√λ π/2)/(k+1)]⁻¹`.
///
/// At `λ = 0` the `λ/sin²` ratio is continued to its limit, which gives the
/// hydrogen estimate `3.6 ω / (π² k(k+1)(2k+1) n²)`.
pub fn epsilon_cr_small_a(
    n: f64,
    k: u32,
    omega: f64,
    p: &SystemParams,
    gates: &RegimeGates,
) -> Result<CriticalFieldResult> {
    check_inputs("epsilon_cr_small_a", n, k, omega)?;
    let kf = f64::from(k);
    let bracket = sin2_over_lambda(kf, p.lambda) / kf + sin2_over_lambda(kf + 1.0, p.lambda) / (kf + 1.0);
    let scale = 1.0 / kf + if p.lambda > 0.0 { 1.0 / p.lambda } else { 1.0 };
    if bracket.abs() < 1e-12 * scale {
        return Err(Error::SingularFormula(format!(
            "both sin² factors vanish for k = {k}, λ = {}",
            p.lambda
        )));
    }
    let n4 = p.lambda * n.powi(4);
    let ratio = (29.0 * n4 - 9.0) / (29.0 * n4 - 3.0);
    let eps = 0.3 * omega / (kf * (kf + 1.0) * n * n) * ratio / bracket;
    if p.is_hydrogen() {
        return Ok(result(eps, k, CriticalRegime::Hydrogen, true, n, omega, p));
    }
    let gate = gate_1d(n, p, gates, Regime::SmallA);
    Ok(result(eps, k, CriticalRegime::SmallA, gate, n, omega, p))
}

/// Hydrogen estimate, the `λ → 0` limit of [`epsilon_cr_small_a`].
pub fn epsilon_cr_hydrogen(n: f64, k: u32, omega: f64, z: f64) -> Result<CriticalFieldResult> {
    let p = SystemParams::hydrogen(z)?;
    epsilon_cr_small_a(n, k, omega, &p, &RegimeGates::default())
}

/// 3D estimate
/// `ε = 0.07 λω/(k(k+1)π ñ²) (1 − πL/ñ) {√(16π²/9 + 1/k²) + √(16π²/9 + 1/(k+1)²)}⁻¹ [1 − L²/(4π⁴ñ²)]`
/// with `ñ = (π/√2) n` the action in the printed normalization.
pub fn epsilon_cr_3d(n: f64, k: u32, omega: f64, p: &SystemParams, gates: &RegimeGates) -> Result<CriticalFieldResult> {
    check_inputs("epsilon_cr_3d", n, k, omega)?;
    let np = crate::action_angle::three_d::PRINTED_ACTION_SCALE * n;
    let l = p.l;
    if PI * l / np >= 1.0 {
        return Err(Error::SingularFormula(format!(
            "πL/ñ = {} ≥ 1 makes the estimate negative",
            PI * l / np
        )));
    }
    let kf = f64::from(k);
    let c = 16.0 * PI * PI / 9.0;
    let roots = (c + 1.0 / (kf * kf)).sqrt() + (c + 1.0 / ((kf + 1.0) * (kf + 1.0))).sqrt();
    let eps = 0.07 * p.lambda * omega / (kf * (kf + 1.0) * PI * np * np) * (1.0 - PI * l / np) / roots
        * (1.0 - l * l / (4.0 * PI.powi(4) * np * np));
    let energy = crate::action_angle::h0_3d(n, l, p);
    let gate = gates.admits_3d(n, energy, p);
    if !gate {
        log::debug!("n = {n} is outside the 3D asymptotic regime");
    }
    Ok(result(eps, k, CriticalRegime::ThreeD, gate, n, omega, p))
}

/// Critical field from the overlap criterion itself: bisection on `ε` for
/// `ratio(ε) = threshold` using numeric `x_k` and `ω₀′`. The resonance pair is
/// the adjacent one whose actions bracket `n_center`.
pub fn epsilon_cr_numeric(
    n_center: f64,
    omega: f64,
    chart: &ActionAngleChart,
    cfg: &ChirikovConfig,
) -> Result<CriticalFieldResult> {
    let k0 = (omega / chart.omega0_at_action(n_center)?).floor().clamp(1.0, 1e9) as u32;
    let res = resonance_locations(omega, k0.saturating_sub(2).max(1)..=k0 + 2, chart)?;
    let mut pair_k = None;
    for r in res.iter() {
        if let Some(s) = res.iter().find(|s| s.k == r.k + 1) {
            let (lo, hi) = if r.n_k <= s.n_k { (r.n_k, s.n_k) } else { (s.n_k, r.n_k) };
            if lo * (1.0 - 1e-9) <= n_center && n_center <= hi * (1.0 + 1e-9) {
                pair_k = Some(r.k);
                break;
            }
        }
    }
    let k = pair_k.ok_or_else(|| {
        Error::NoResonance(format!(
            "no adjacent resonances bracket n = {n_center:?} at ω = {omega:?}"
        ))
    })?;
    let pair = ResonancePair::new(omega, k, chart)?;
    let eps = critical_field_of_pair(&pair, cfg)?;
    Ok(result(
        eps,
        k,
        CriticalRegime::Numeric,
        true,
        n_center,
        omega,
        chart.params(),
    ))
}

/// Smallest `ε` with `pair.ratio(ε) ≥ threshold`, to 1e−10 relative.
pub fn critical_field_of_pair(pair: &ResonancePair, cfg: &ChirikovConfig) -> Result<f64> {
    let f = |e: f64| pair.ratio(e, cfg).unwrap_or(f64::NAN) - cfg.threshold;
    let r1 = f(1.0) + cfg.threshold;
    if !(r1 > 0.0 && r1.is_finite()) {
        return Err(Error::NoResonance("zero overlap ratio at unit field".into()));
    }
    // Both width laws are power laws in ε, so this guess is already close.
    let guess = match cfg.width_law {
        WidthLaw::SquareRoot => (cfg.threshold / r1).powi(2),
        WidthLaw::Printed => cfg.threshold / r1,
    };
    let (lo, hi) = (0.5 * guess, 2.0 * guess);
    brent("epsilon_cr_numeric", f, lo, hi, 1e-10 * guess)
}

/// Modes of a critical-field scan over `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanMode {
    Hydrogen,
    SmallA,
    LargeA,
    Numeric,
}

impl ScanMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ScanMode::Hydrogen => "hydrogen",
            ScanMode::SmallA => "small_a",
            ScanMode::LargeA => "large_a",
            ScanMode::Numeric => "numeric",
        }
    }
}

impl std::str::FromStr for ScanMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hydrogen" => Ok(ScanMode::Hydrogen),
            "small_a" => Ok(ScanMode::SmallA),
            "large_a" => Ok(ScanMode::LargeA),
            "numeric" => Ok(ScanMode::Numeric),
            other => Err(Error::domain("ScanMode", format!("unknown mode {other:?}"))),
        }
    }
}

/// One `(n, mode)` point of a scan; failed points keep `epsilon_cr = None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub n: f64,
    pub mode: ScanMode,
    pub epsilon_cr: Option<f64>,
    pub k: u32,
    pub regime_gate_ok: bool,
    pub error: Option<String>,
}

/// Settings shared by every point of a scan.
#[derive(Debug, Clone)]
pub struct ScanSettings<'a> {
    pub k: u32,
    pub gates: RegimeGates,
    pub chirikov: ChirikovConfig,
    /// Needed only for [`ScanMode::Numeric`].
    pub chart: Option<&'a ActionAngleChart>,
}

/// `ε_cr(n)` for every requested mode, computed in parallel over `n`.
/// Output is ordered by `n`, then by the order of `modes`.
pub fn scan_critical_field(
    n_values: &[f64],
    omega: f64,
    modes: &[ScanMode],
    p: &SystemParams,
    settings: &ScanSettings<'_>,
) -> Result<Vec<ScanRow>> {
    if modes.is_empty() {
        return Err(Error::domain("scan_critical_field", "no modes requested"));
    }
    let rows: Vec<Vec<ScanRow>> = n_values
        .par_iter()
        .map(|&n| {
            modes
                .iter()
                .map(|&mode| {
                    let r = match mode {
                        ScanMode::Hydrogen => epsilon_cr_hydrogen(n, settings.k, omega, p.z),
                        ScanMode::SmallA => epsilon_cr_small_a(n, settings.k, omega, p, &settings.gates),
                        ScanMode::LargeA => epsilon_cr_large_a(n, settings.k, omega, p, &settings.gates),
                        ScanMode::Numeric => match settings.chart {
                            Some(c) => epsilon_cr_numeric(n, omega, c, &settings.chirikov),
                            None => Err(Error::domain("scan_critical_field", "numeric mode needs a chart")),
                        },
                    };
                    match r {
                        Ok(r) => ScanRow {
                            n,
                            mode,
                            epsilon_cr: Some(r.epsilon_cr),
                            k: r.k_pair.0,
                            regime_gate_ok: r.regime_gate_ok,
                            error: None,
                        },
                        Err(e) => ScanRow {
                            n,
                            mode,
                            epsilon_cr: None,
                            k: settings.k,
                            regime_gate_ok: false,
                            error: Some(e.to_string()),
                        },
                    }
                })
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// Writes scan rows as CSV with columns `n, mode, epsilon_cr, k, regime_gate_ok`;
/// gaps have an empty `epsilon_cr`.
pub fn write_scan_csv<W: std::io::Write>(rows: &[ScanRow], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["n", "mode", "epsilon_cr", "k", "regime_gate_ok"])?;
    for r in rows {
        wr.write_record([
            format!("{:?}", r.n),
            r.mode.as_str().to_owned(),
            r.epsilon_cr.map(|e| format!("{e:?}")).unwrap_or_default(),
            r.k.to_string(),
            r.regime_gate_ok.to_string(),
        ])?;
    }
    wr.flush()?;
    Ok(())
}
