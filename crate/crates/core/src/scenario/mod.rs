//! Scenario configuration, built-in presets and the data-emitting commands.
//!
//! A scenario is a TOML file. The `[units]` table is mandatory and must read
//! `system = "scaled"`: energies in units of the resonance spacing, rates in
//! units of Ng̃², c = 1.
//!
//! ```toml
//! [units]
//! system = "scaled"
//!
//! [[resonances]]
//! e = 0.0
//! gamma = 0.2
//! q = 7.0
//! zeta = 0.1
//!
//! [medium]
//! n_g2 = 1.0
//! control = [0.01, 0.0]
//! x = 0.5
//! ```

mod commands;

pub use commands::{cmd_check, cmd_dispersion, cmd_simulate, cmd_spectra, eigen_residual};

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dispersion::{MediumParams, RegimeThresholds};
use crate::error::{Error, Result};
use crate::fano::{effective_levels, BareResonancePair, Resonance, ResonanceModel, Tolerances};
use crate::memory::{ControlSchedule, RetrievalMethod};
use crate::pulse::PulseState;
use crate::response::{response_point, TwoResonanceClosedForm};
use crate::C64;

/// Line written at the top of every emitted file.
pub const UNITS_NOTE: &str = "scaled units: energies in ΔẼ = Ẽ_max − Ẽ_min (Γ̃ for a single resonance), \
     x = (ω − (Ẽ₁ − ε₂))/ΔẼ; rates and inverse times in Ng̃²; lengths in c/Ng̃² with c = 1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Units {
    pub system: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResonanceConfig {
    pub e: f64,
    pub gamma: f64,
    pub q: f64,
    #[serde(default)]
    pub zeta: f64,
}

/// Two interacting bare levels reduced to effective resonances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarePairConfig {
    pub e1: f64,
    pub e2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    #[serde(default)]
    pub delta1: f64,
    #[serde(default)]
    pub delta2: f64,
    /// Re, Im of Δ₁₂
    pub delta12: [f64; 2],
    pub q: [f64; 2],
    #[serde(default)]
    pub zeta: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ResponseForm {
    /// General pole sums.
    #[default]
    Generic,
    /// Two-resonance closed forms.
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MediumConfig {
    pub n_g2: f64,
    /// Re, Im of Ω̃ while the control is on.
    pub control: [f64; 2],
    pub gamma_c: f64,
    pub nu: f64,
    pub gamma2: f64,
    pub c: f64,
    pub g_tilde: f64,
    /// Operating detuning x of the signal carrier.
    pub x: f64,
    pub response: ResponseForm,
}

impl Default for MediumConfig {
    fn default() -> Self {
        MediumConfig {
            n_g2: 1.0,
            control: [0.01, 0.0],
            gamma_c: 0.0,
            nu: 0.0,
            gamma2: 0.0,
            c: 1.0,
            g_tilde: 1.0,
            x: 0.5,
            response: ResponseForm::Generic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
    /// Lower-level energy ε₂, only used to report ω.
    pub eps2: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { x_min: -1.0, x_max: 2.0, points: 301, eps2: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DispersionConfig {
    pub k_min: f64,
    pub k_max: f64,
    pub points: usize,
}

impl Default for DispersionConfig {
    fn default() -> Self {
        DispersionConfig { k_min: -0.1, k_max: 0.1, points: 201 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PulseConfig {
    pub points: usize,
    /// Domain length; 0 picks the recommended length for the expected travel.
    pub length: f64,
    /// Pulse center relative to the domain middle.
    pub center: f64,
    pub width: f64,
    pub amplitude: [f64; 2],
}

impl Default for PulseConfig {
    fn default() -> Self {
        PulseConfig { points: 1024, length: 0.0, center: 0.0, width: 50.0, amplitude: [1.0, 0.0] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScheduleConfig {
    /// Write duration T; 0 uses width/v_g⁽⁺⁾.
    pub write: f64,
    pub storage: f64,
    pub retrieve: f64,
    /// Number of retrieval snapshots.
    pub snapshots: usize,
    pub method: RetrievalMethod,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig { write: 0.0, storage: 1e5, retrieve: 1e6, snapshots: 5, method: RetrievalMethod::SlowBranch }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub units: Units,
    #[serde(default)]
    pub resonances: Vec<ResonanceConfig>,
    #[serde(default)]
    pub bare_pair: Option<BarePairConfig>,
    /// Alternative q values, one list per emitted spectrum set.
    #[serde(default)]
    pub q_sets: Vec<Vec<f64>>,
    #[serde(default)]
    pub medium: MediumConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub dispersion: DispersionConfig,
    #[serde(default)]
    pub pulse: PulseConfig,
    #[serde(default)]
    pub schedule: ScheduleConfig,
    #[serde(default)]
    pub thresholds: RegimeThresholds,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig3,
    Ideal,
    Custom,
}

impl std::str::FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig3" => Ok(Preset::Fig3),
            "ideal" => Ok(Preset::Ideal),
            "custom" => Ok(Preset::Custom),
            other => Err(Error::Config(format!("unknown preset {other:?}"))),
        }
    }
}

fn two_level(q: [f64; 2], zeta: f64) -> Vec<ResonanceConfig> {
    vec![
        ResonanceConfig { e: 0.0, gamma: 0.2, q: q[0], zeta },
        ResonanceConfig { e: 1.0, gamma: 0.2, q: q[1], zeta },
    ]
}

impl ScenarioConfig {
    /// Two resonances at x = 0 and 1 with p₁ = p₂ = 0.2, ζ = 0.1, and the
    /// q sets (7, 4) and (8, 6). Ng̃²/|Ω̃|² = 10⁴, operating point x = 0.5.
    pub fn fig3() -> Self {
        ScenarioConfig {
            units: Units { system: "scaled".into() },
            resonances: two_level([7.0, 4.0], 0.1),
            bare_pair: None,
            q_sets: vec![vec![7.0, 4.0], vec![8.0, 6.0]],
            medium: MediumConfig::default(),
            grid: GridConfig::default(),
            dispersion: DispersionConfig::default(),
            pulse: PulseConfig::default(),
            schedule: ScheduleConfig::default(),
            thresholds: RegimeThresholds::default(),
            tolerances: Tolerances::default(),
        }
    }

    /// Same medium with ζ = ν = γ_c = 0.
    pub fn ideal() -> Self {
        ScenarioConfig { resonances: two_level([7.0, 4.0], 0.0), q_sets: Vec::new(), ..Self::fig3() }
    }

    pub fn preset(p: Preset) -> Result<Self> {
        match p {
            Preset::Fig3 => Ok(Self::fig3()),
            Preset::Ideal => Ok(Self::ideal()),
            Preset::Custom => Err(Error::Config("the custom preset needs --config <path>".into())),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| Error::Io { path: path.display().to_string(), source })?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.units.system != "scaled" {
            return Err(Error::Config(format!(
                "units.system must be \"scaled\", got {:?}",
                self.units.system
            )));
        }
        match (self.resonances.is_empty(), self.bare_pair.is_some()) {
            (true, false) => return Err(Error::Config("no resonances given".into())),
            (false, true) => return Err(Error::Config("give either resonances or bare_pair, not both".into())),
            _ => {}
        }
        let n = self.resonance_count();
        if let Some(bad) = self.q_sets.iter().find(|s| s.len() != n) {
            return Err(Error::Config(format!("q set {bad:?} does not have {n} entries")));
        }
        if self.grid.points == 0 {
            return Err(Error::Config("frequency grid is empty".into()));
        }
        if self.dispersion.points == 0 {
            return Err(Error::Config("k grid is empty".into()));
        }
        if self.pulse.points < 16 {
            return Err(Error::Config("pulse grid needs at least 16 points".into()));
        }
        if !(self.pulse.width > 0.0) {
            return Err(Error::Config("pulse width must be > 0".into()));
        }
        let s = &self.schedule;
        if !(s.retrieve > 0.0) || !(s.storage >= 0.0) || !(s.write >= 0.0) {
            return Err(Error::Config("schedule durations must be ≥ 0 (retrieve > 0)".into()));
        }
        self.medium_params_for(&self.model()?)?.validate()
    }

    fn resonance_count(&self) -> usize {
        if self.bare_pair.is_some() {
            2
        } else {
            self.resonances.len()
        }
    }

    /// The resonance set with its own q values.
    pub fn model(&self) -> Result<ResonanceModel> {
        self.model_with_q(None)
    }

    /// The resonance set with q replaced by `q` when given.
    pub fn model_with_q(&self, q: Option<&[f64]>) -> Result<ResonanceModel> {
        let mut res: Vec<Resonance> = match &self.bare_pair {
            Some(b) => {
                let pair = BareResonancePair {
                    e1: b.e1,
                    e2: b.e2,
                    gamma1: b.gamma1,
                    gamma2: b.gamma2,
                    delta1: b.delta1,
                    delta2: b.delta2,
                    delta12: C64::new(b.delta12[0], b.delta12[1]),
                };
                effective_levels(&pair)?.resonances(b.q, b.zeta)?.to_vec()
            }
            None => self
                .resonances
                .iter()
                .map(|r| Resonance::new(r.e, r.gamma, r.q, r.zeta))
                .collect::<Result<_>>()?,
        };
        if let Some(q) = q {
            // q values are matched to resonances in order of energy
            res.sort_by(|a, b| a.e_tilde.total_cmp(&b.e_tilde));
            for (r, qv) in res.iter_mut().zip(q) {
                r.q = *qv;
            }
        }
        ResonanceModel::with_tolerances(res, self.tolerances)
    }

    /// q sets to emit spectra for; the configured q values when none given.
    pub fn spectrum_sets(&self) -> Result<Vec<(String, ResonanceModel)>> {
        if self.q_sets.is_empty() {
            return Ok(vec![("spectra".to_string(), self.model()?)]);
        }
        self.q_sets
            .iter()
            .map(|q| {
                let label = q.iter().map(|v| format!("q{}", fmt_label(*v))).collect::<Vec<_>>().join("_");
                Ok((format!("spectra_{label}"), self.model_with_q(Some(q))?))
            })
            .collect()
    }

    /// Medium parameters at the operating point with the configured control.
    pub fn medium_params_for(&self, model: &ResonanceModel) -> Result<MediumParams> {
        let m = &self.medium;
        let response = match m.response {
            ResponseForm::Generic => response_point(model, m.x, m.gamma2)?,
            ResponseForm::ClosedForm => TwoResonanceClosedForm::from_model(model)?.point(m.x),
        };
        let params = MediumParams {
            n_g2: m.n_g2,
            control: C64::new(m.control[0], m.control[1]),
            gamma_c: m.gamma_c,
            nu: m.nu,
            gamma2: m.gamma2,
            c: m.c,
            g_tilde: m.g_tilde,
            response,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn medium_params(&self) -> Result<MediumParams> {
        self.medium_params_for(&self.model()?)
    }

    /// Write duration: configured, or the time the pulse needs to enter
    /// the medium at the slow group velocity.
    pub fn write_duration(&self, vg_plus: f64) -> f64 {
        if self.schedule.write > 0.0 {
            self.schedule.write
        } else {
            self.pulse.width / vg_plus.abs()
        }
    }

    pub fn schedule_for(&self, params: &MediumParams, vg_plus: f64) -> Result<ControlSchedule> {
        ControlSchedule::write_store_retrieve(
            params.control,
            self.write_duration(vg_plus),
            self.schedule.storage,
            self.schedule.retrieve,
        )
    }

    /// Input pulse on a periodic domain wide enough for the retrieval travel.
    pub fn input_pulse(&self, vg_plus: f64) -> Result<PulseState> {
        let p = &self.pulse;
        let travel = vg_plus * self.schedule.retrieve;
        let length = if p.length > 0.0 { p.length } else { PulseState::recommended_length(p.width, travel) };
        let z0 = -0.5 * length;
        // start half the travel behind the middle so the output ends up centered
        let center = p.center - 0.5 * travel;
        PulseState::gaussian(p.points, z0, length, center, p.width, C64::new(p.amplitude[0], p.amplitude[1]))
    }
}

fn fmt_label(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{}", v as i64)
    } else {
        format!("{v}").replace('.', "p")
    }
}
