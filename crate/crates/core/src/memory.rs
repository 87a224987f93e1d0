//! Write → store → retrieve with an instantaneously switched control field.
//!
//! While the control is on, the signal is mapped onto the coherence
//! σ₂₁ = −w·g̃α/Ω̃ with
//! `w = 1 − f/2 − (γ_c/2 − iν)/(|Ω̃|²|β₁|)`.
//! With the control off the field is zero and σ₂₁ only rotates and decays,
//! `σ₂₁ ← σ₂₁·e^{i(ν + iγ_c/2)τ}`. Switching the control back on releases
//! the slow polariton, which is compared against the input pulse.

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::dispersion::{memory_regime, small_k, MediumParams, RegimeThresholds, Wavenumbers};
use crate::error::{Error, Result};
use crate::pulse::{propagate_pulse, to_kspace, to_zspace, BranchSelection, PulseState};
use crate::{C64, I};

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlSegment {
    pub t_start: f64,
    pub t_end: f64,
    pub control: C64,
}

impl ControlSegment {
    pub fn new(t_start: f64, t_end: f64, control: C64) -> Self {
        ControlSegment { t_start, t_end, control }
    }

    pub fn duration(&self) -> f64 {
        self.t_end - self.t_start
    }

    pub fn is_on(&self) -> bool {
        self.control != ZERO
    }
}

/// Piecewise-constant control amplitude. Gaps between segments count as
/// control off.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlSchedule {
    segments: Vec<ControlSegment>,
}

impl ControlSchedule {
    pub fn new(segments: Vec<ControlSegment>) -> Result<Self> {
        for s in &segments {
            if !(s.t_start.is_finite() && s.t_end.is_finite() && s.control.is_finite()) {
                return Err(Error::Schedule("non-finite segment".into()));
            }
            if !(s.t_end > s.t_start) {
                return Err(Error::Schedule(format!("empty segment [{}, {}]", s.t_start, s.t_end)));
            }
        }
        if segments.windows(2).any(|w| w[1].t_start < w[0].t_end) {
            return Err(Error::Schedule("segments overlap or are out of order".into()));
        }
        Ok(ControlSchedule { segments })
    }

    /// Control on for `write`, off for `storage`, on again for `retrieve`.
    pub fn write_store_retrieve(control: C64, write: f64, storage: f64, retrieve: f64) -> Result<Self> {
        let mut segs = vec![ControlSegment::new(0.0, write, control)];
        if storage > 0.0 {
            segs.push(ControlSegment::new(write, write + storage, ZERO));
        }
        segs.push(ControlSegment::new(write + storage, write + storage + retrieve, control));
        Self::new(segs)
    }

    pub fn segments(&self) -> &[ControlSegment] {
        &self.segments
    }

    pub fn control_at(&self, t: f64) -> C64 {
        self.segments
            .iter()
            .find(|s| t >= s.t_start && t < s.t_end)
            .map_or(ZERO, |s| s.control)
    }

    /// Splits the schedule into (write, storage time, retrieve). The first
    /// and last segments must have the control on and every segment in
    /// between must have it off.
    pub fn phases(&self) -> Result<(ControlSegment, f64, ControlSegment)> {
        let (first, last) = match (self.segments.first(), self.segments.last()) {
            (Some(f), Some(l)) if self.segments.len() >= 2 => (*f, *l),
            _ => return Err(Error::Schedule("need a write and a retrieve segment".into())),
        };
        if !first.is_on() || !last.is_on() {
            return Err(Error::Schedule("write and retrieve segments need a nonzero control".into()));
        }
        if self.segments[1..self.segments.len() - 1].iter().any(|s| s.is_on()) {
            return Err(Error::Schedule("control must stay off between write and retrieve".into()));
        }
        Ok((first, last.t_start - first.t_end, last))
    }
}

/// Coherence left in the medium when the control is switched off.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WriteOutput {
    /// α = 0, σ₂₁ = stored coherence.
    pub stored: PulseState,
    /// The bracket w multiplying −g̃α/Ω̃.
    pub factor: C64,
    /// 1/(|Ω̃|²|β₁|T)
    pub eit_ratio: f64,
    pub warnings: Vec<String>,
}

/// `1 − f/2 − (γ_c/2 − iν)/(|Ω̃|²|β₁|)`
pub fn write_factor(params: &MediumParams) -> C64 {
    let r = &params.response;
    let w = params.omega_ctrl2();
    1.0 - 0.5 * r.f - C64::new(0.5 * params.gamma_c, -params.nu) / (w * r.beta1.norm())
}

pub fn write_stage(
    input: &PulseState,
    params: &MediumParams,
    duration: f64,
    thresholds: &RegimeThresholds,
) -> Result<WriteOutput> {
    params.validate()?;
    if params.control == ZERO {
        return Err(Error::InvalidParameter("write stage needs a nonzero control".into()));
    }
    let factor = write_factor(params);
    let scale = -factor * params.g_tilde / params.control;
    let sigma21 = input.alpha.iter().map(|a| scale * a).collect();
    let stored = PulseState::new(input.z0, input.dz, vec![ZERO; input.len()], sigma21, input.time)?;
    let eit_ratio = 1.0 / (params.omega_ctrl2() * params.response.beta1.norm() * duration);
    let mut warnings = Vec::new();
    if !(eit_ratio < thresholds.eit_transparency) {
        warnings.push(format!(
            "transparency condition 1/(|Ω̃|²|β₁|T) = {eit_ratio:.3e} not below {}",
            thresholds.eit_transparency
        ));
    }
    Ok(WriteOutput { stored, factor, eit_ratio, warnings })
}

/// Free evolution of the coherence with the control off.
pub fn storage_decay(stored: &PulseState, params: &MediumParams, tau: f64) -> PulseState {
    let phase = (I * params.mu() * tau).exp();
    PulseState {
        alpha: vec![ZERO; stored.len()],
        sigma21: stored.sigma21.iter().map(|s| s * phase).collect(),
        time: stored.time + tau,
        ..stored.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RetrievalMethod {
    /// Exact slow-branch component of every mode.
    #[default]
    SlowBranch,
    /// Leading-order form `P·α⁽⁰⁾(k)·e^{kχ₊t}·e^{−ikv_g t}` with the
    /// memory-regime v_g and χ₊. Modes where the dropped quadratic phase
    /// ½|ω₊''(0)|k²t exceeds one radian are set to zero.
    Expansion,
}

/// Amplitude factor `1 − (|Ω̃|²/Ng̃²)f + i(ν + iγ_c/2)/(β₁|Ω̃|²)`.
pub fn retrieval_prefactor(params: &MediumParams) -> C64 {
    let r = &params.response;
    let w = params.omega_ctrl2();
    1.0 - (w / params.n_g2) * r.f + I * params.mu() / (r.beta1 * w)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrieveOutput {
    pub pulse: PulseState,
    pub vg_plus: f64,
    pub chi_plus: f64,
    pub prefactor: C64,
}

/// Releases the stored coherence with the control switched on for time t.
/// The expansion method only reconstructs the field; its σ₂₁ is zero.
pub fn retrieve_stage(
    stored: &PulseState,
    params: &MediumParams,
    t: f64,
    method: RetrievalMethod,
) -> Result<RetrieveOutput> {
    params.validate()?;
    if params.control == ZERO {
        return Err(Error::InvalidParameter("retrieval needs a nonzero control".into()));
    }
    let start = PulseState { alpha: vec![ZERO; stored.len()], ..stored.clone() };
    let prefactor = retrieval_prefactor(params);
    match method {
        RetrievalMethod::SlowBranch => {
            let bp = small_k(&Wavenumbers::new(params)?, params.c)?;
            let pulse = propagate_pulse(&start, params, t, BranchSelection::SlowOnly)?;
            Ok(RetrieveOutput { pulse, vg_plus: bp.vg_plus, chi_plus: bp.chi_plus, prefactor })
        }
        RetrievalMethod::Expansion => {
            let bp = memory_regime(params, &RegimeThresholds::default())?.point;
            let wn = Wavenumbers::new(params)?;
            // ω₊'' = (c/2)S'' with S'' = −(k₁ − k₂)²/(4S³)
            let s0 = wn.root_at_zero();
            let curvature = 0.5 * params.c * (wn.k1 - wn.k2).norm_sqr() / (4.0 * s0.norm().powi(3));
            let k_max = if curvature * t > 0.0 { (2.0 / (curvature * t)).sqrt() } else { f64::INFINITY };
            let mut modes = to_kspace(&start);
            // invert σ⁽⁰⁾ = −w·g̃α⁽⁰⁾/Ω̃
            let to_alpha = -params.control / (params.g_tilde * write_factor(params));
            for j in 0..modes.len() {
                let k = modes.k[j];
                let alpha0 = to_alpha * modes.sigma21[j];
                let evo = (k * bp.chi_plus * t).exp() * (-I * k * bp.vg_plus * t).exp();
                modes.alpha[j] = if k.abs() <= k_max { prefactor * alpha0 * evo } else { ZERO };
                modes.sigma21[j] = ZERO;
            }
            modes.time += t;
            Ok(RetrieveOutput {
                pulse: to_zspace(&modes),
                vg_plus: bp.vg_plus,
                chi_plus: bp.chi_plus,
                prefactor,
            })
        }
    }
}

/// Normalized overlap maximized over a continuous translation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fidelity {
    pub fidelity: f64,
    /// Best shift of `output` relative to `reference`, in (−L/2, L/2].
    pub delay: f64,
    /// ‖output‖/‖reference‖
    pub amplitude_ratio: f64,
}

/// `max_s |Σ conj(A_k)B_k e^{iks}|²/(Σ|A_k|²Σ|B_k|²)` for the field
/// spectra A of `reference` and B of `output` on the same grid.
pub fn fidelity(reference: &PulseState, output: &PulseState) -> Result<Fidelity> {
    if reference.len() != output.len() || reference.dz != output.dz || reference.z0 != output.z0 {
        return Err(Error::InvalidParameter("fidelity needs pulses on the same grid".into()));
    }
    let a = to_kspace(reference);
    let b = to_kspace(output);
    let na: f64 = a.alpha.iter().map(|c| c.norm_sqr()).sum();
    let nb: f64 = b.alpha.iter().map(|c| c.norm_sqr()).sum();
    if na == 0.0 {
        return Err(Error::EmptyPulse("reference field is zero".into()));
    }
    if nb == 0.0 {
        return Ok(Fidelity { fidelity: 0.0, delay: 0.0, amplitude_ratio: 0.0 });
    }
    let cross: Vec<C64> = a.alpha.iter().zip(&b.alpha).map(|(x, y)| x.conj() * y).collect();

    let n = cross.len();
    let mut coarse = cross.clone();
    FftPlanner::new().plan_fft_inverse(n).process(&mut coarse);
    let best = (0..n)
        .max_by(|i, j| coarse[*i].norm_sqr().total_cmp(&coarse[*j].norm_sqr()))
        .unwrap_or(0);

    let overlap = |s: f64| -> f64 {
        cross
            .iter()
            .zip(&a.k)
            .map(|(c, k)| c * (I * k * s).exp())
            .sum::<C64>()
            .norm_sqr()
    };
    let dz = reference.dz;
    let s0 = best as f64 * dz;
    let (mut lo, mut hi) = (s0 - dz, s0 + dz);
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (overlap(x1), overlap(x2));
    for _ in 0..80 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = overlap(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = overlap(x1);
        }
        if hi - lo < 1e-12 * dz {
            break;
        }
    }
    let (s, peak) = [(s0, overlap(s0)), (x1, f1), (x2, f2)]
        .into_iter()
        .max_by(|p, q| p.1.total_cmp(&q.1))
        .expect("three candidates");
    let length = reference.length();
    let mut delay = s.rem_euclid(length);
    if delay > 0.5 * length {
        delay -= length;
    }
    Ok(Fidelity {
        fidelity: (peak / (na * nb)).clamp(0.0, 1.0),
        delay,
        amplitude_ratio: (nb / na).sqrt(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoryReport {
    /// σ₂₁(z) at the moment the control is switched back on.
    pub stored: Vec<C64>,
    pub retrieved: PulseState,
    pub method: RetrievalMethod,
    pub fidelity: f64,
    pub amplitude_ratio: f64,
    /// Measured translation of the retrieved field.
    pub delay: f64,
    /// v_g⁽⁺⁾·t_retrieve
    pub expected_delay: f64,
    pub vg_plus: f64,
    pub chi_plus: f64,
    pub chi_over_vg: f64,
    /// l = v_g⁽⁺⁾²T/|χ₊|; absent when χ₊ = 0.
    pub absorption_length: Option<f64>,
    /// L = v_g⁽⁺⁾T
    pub pulse_length: f64,
    pub prefactor: C64,
    pub write_factor: C64,
    pub eit_ratio: f64,
    pub write_time: f64,
    pub storage_time: f64,
    pub retrieve_time: f64,
    pub warnings: Vec<String>,
}

/// Runs the full protocol. `params.control` is ignored; the schedule sets
/// the control of each stage. The write segment duration is the pulse
/// duration T.
pub fn round_trip(
    input: &PulseState,
    schedule: &ControlSchedule,
    params: &MediumParams,
    method: RetrievalMethod,
    thresholds: &RegimeThresholds,
) -> Result<MemoryReport> {
    if input.field_energy() == 0.0 {
        return Err(Error::EmptyPulse("input field is identically zero".into()));
    }
    let (write, storage_time, retrieve) = schedule.phases()?;
    let write_params = params.with_control(write.control);
    let retrieve_params = params.with_control(retrieve.control);

    let w = write_stage(input, &write_params, write.duration(), thresholds)?;
    let mut warnings = w.warnings.clone();
    warnings.extend(memory_regime(&retrieve_params, thresholds)?.warnings);
    let stored = storage_decay(&w.stored, params, storage_time);
    let r = retrieve_stage(&stored, &retrieve_params, retrieve.duration(), method)?;
    let fid = fidelity(input, &r.pulse)?;

    let t_pulse = write.duration();
    let chi_over_vg = r.chi_plus / r.vg_plus;
    if !(chi_over_vg.abs() < thresholds.absorption_length) {
        warnings.push(format!(
            "|χ₊|/v_g⁽⁺⁾ = {:.3e} not below {}",
            chi_over_vg.abs(),
            thresholds.absorption_length
        ));
    }
    Ok(MemoryReport {
        stored: stored.sigma21,
        retrieved: r.pulse,
        method,
        fidelity: fid.fidelity,
        amplitude_ratio: fid.amplitude_ratio,
        delay: fid.delay,
        expected_delay: r.vg_plus * retrieve.duration(),
        vg_plus: r.vg_plus,
        chi_plus: r.chi_plus,
        chi_over_vg,
        absorption_length: (r.chi_plus != 0.0).then(|| r.vg_plus * r.vg_plus * t_pulse / r.chi_plus.abs()),
        pulse_length: r.vg_plus * t_pulse,
        prefactor: r.prefactor,
        write_factor: w.factor,
        eit_ratio: w.eit_ratio,
        write_time: t_pulse,
        storage_time,
        retrieve_time: retrieve.duration(),
        warnings,
    })
}
