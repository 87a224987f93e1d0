//! Polariton dispersion of the coupled field/coherence system.
//!
//! Per spatial mode k the mean-field amplitudes obey a linear 2×2 system
//! whose eigenfrequencies are
//! `ω±(k) = (c/2)(k − k₀ ± √((k − k₁)(k − k₂)))`.
//! The square root is continued along real k from k = 0, where its sign is
//! chosen so that ω₊(0) is the root of smaller modulus: ω₊ is the slow
//! (dark) branch, ω₋ the fast, strongly damped one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fano::ResonanceModel;
use crate::response::ResponsePoint;
use crate::{C64, I};

/// Medium and field parameters at the operating signal frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumParams {
    /// Collective coupling Ng̃².
    pub n_g2: f64,
    /// Control Rabi amplitude Ω̃.
    pub control: C64,
    /// Lower-level decoherence γ_c.
    pub gamma_c: f64,
    /// Two-photon detuning ν.
    pub nu: f64,
    /// Width γ̃₂ used when the response was evaluated.
    pub gamma2: f64,
    /// Propagation speed of the signal (1 in scaled units).
    pub c: f64,
    /// Single-atom coupling g̃; fixes the normalization of σ₂₁ (N = Ng̃²/g̃²).
    pub g_tilde: f64,
    pub response: ResponsePoint,
}

impl MediumParams {
    /// Scaled units: c = 1, g̃ = 1, γ̃₂ = 0.
    pub fn scaled(n_g2: f64, control: C64, gamma_c: f64, nu: f64, response: ResponsePoint) -> Self {
        MediumParams { n_g2, control, gamma_c, nu, gamma2: 0.0, c: 1.0, g_tilde: 1.0, response }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        if !(self.n_g2 > 0.0 && self.n_g2.is_finite()) {
            return bad("Ng̃² must be > 0");
        }
        if !(self.gamma_c >= 0.0) {
            return bad("γ_c must be ≥ 0");
        }
        if !(self.c > 0.0) {
            return bad("c must be > 0");
        }
        if !(self.g_tilde > 0.0) {
            return bad("g̃ must be > 0");
        }
        if !(self.gamma2 >= 0.0) {
            return bad("γ̃₂ must be ≥ 0");
        }
        if !self.control.is_finite() || !self.nu.is_finite() {
            return bad("Ω̃ and ν must be finite");
        }
        Ok(())
    }

    /// |Ω̃|²
    pub fn omega_ctrl2(&self) -> f64 {
        self.control.norm_sqr()
    }

    /// ν + iγ_c/2
    pub fn mu(&self) -> C64 {
        C64::new(self.nu, 0.5 * self.gamma_c)
    }

    /// N·g̃
    pub fn n_g(&self) -> f64 {
        self.n_g2 / self.g_tilde
    }

    pub fn with_control(&self, control: C64) -> Self {
        MediumParams { control, ..*self }
    }
}

/// Characteristic wavenumbers of the dispersion relation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wavenumbers {
    pub k0: C64,
    pub k1: C64,
    pub k2: C64,
    pub k0_tilde: C64,
    pub k0_tilde_prime: C64,
}

/// Frequencies, group velocities and gain/loss slopes of both branches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub omega_plus: C64,
    pub omega_minus: C64,
    pub vg_plus: f64,
    pub vg_minus: f64,
    pub chi_plus: f64,
    pub chi_minus: f64,
}

impl Wavenumbers {
    pub fn new(params: &MediumParams) -> Result<Self> {
        params.validate()?;
        let w = params.omega_ctrl2();
        let g = params.n_g2;
        let mu = params.mu();
        let ResponsePoint { beta1, beta1_l, beta2, .. } = params.response;
        let coupling = (g * w).sqrt();
        let ic = I / params.c;
        let common = beta1_l * w - beta1 * g;
        Ok(Wavenumbers {
            k1: -ic * (common + 2.0 * I * beta2 * coupling - I * mu),
            k2: -ic * (common - 2.0 * I * beta2 * coupling - I * mu),
            k0: ic * (beta1_l * w + beta1 * g - I * mu),
            k0_tilde: -ic * (common + I * mu),
            k0_tilde_prime: -ic * (common - I * mu),
        })
    }

    /// (k − k₁)(k − k₂)
    pub fn discriminant(&self, k: f64) -> C64 {
        (k - self.k1) * (k - self.k2)
    }

    fn scale(&self) -> f64 {
        [self.k0, self.k1, self.k2, self.k0_tilde_prime]
            .iter()
            .map(|v| v.norm())
            .fold(f64::MIN_POSITIVE, f64::max)
    }

    fn degenerate(&self) -> bool {
        (self.k1 - self.k2).norm() <= 1e-13 * self.scale()
    }

    /// √(k₁k₂) with the sign that makes |ω₊(0)| the smaller root.
    pub fn root_at_zero(&self) -> C64 {
        let s = (self.k1 * self.k2).sqrt();
        if (s - self.k0).norm() <= (-s - self.k0).norm() {
            s
        } else {
            -s
        }
    }

    /// ω± at k for a given branch of the square root.
    pub fn omegas_with_root(&self, k: f64, root: C64, c: f64) -> (C64, C64) {
        let base = k - self.k0;
        (0.5 * c * (base + root), 0.5 * c * (base - root))
    }

    /// Carries the square-root branch `from_root` at `from_k` continuously
    /// to `to_k`, subdividing the segment according to its distance from
    /// the branch points k₁, k₂.
    pub fn continue_root(&self, from_k: f64, from_root: C64, to_k: f64) -> Result<C64> {
        if from_k == to_k {
            return Ok(from_root);
        }
        if self.degenerate() {
            // √((k − k₁)²) = ±(k − k₁) is entire
            let sign = if ((from_k - self.k1) - from_root).norm() <= ((from_k - self.k1) + from_root).norm() {
                1.0
            } else {
                -1.0
            };
            return Ok(sign * (to_k - self.k1));
        }
        let dist = [self.k1, self.k2]
            .iter()
            .map(|b| distance_to_segment(*b, from_k, to_k))
            .fold(f64::INFINITY, f64::min);
        if dist <= 1e-12 * self.scale() {
            return Err(Error::SingularDispersion(format!(
                "branch point on the real k path between {from_k} and {to_k}"
            )));
        }
        let steps = ((to_k - from_k).abs() / (0.2 * dist)).ceil();
        if steps > 1e7 {
            return Err(Error::SingularDispersion(format!(
                "branch point within {dist:.3e} of the real k axis"
            )));
        }
        let steps = steps.max(1.0) as usize;
        let mut root = from_root;
        for j in 1..=steps {
            let k = from_k + (to_k - from_k) * j as f64 / steps as f64;
            root = nearest_sign(self.discriminant(k).sqrt(), root);
        }
        Ok(root)
    }

    /// Square-root branch at each k, continued from the k = 0 convention.
    /// `ks` may be in any order.
    pub fn roots_for(&self, ks: &[f64]) -> Result<Vec<C64>> {
        let mut order: Vec<usize> = (0..ks.len()).collect();
        order.sort_by(|a, b| ks[*a].total_cmp(&ks[*b]));
        let split = order.partition_point(|i| ks[*i] < 0.0);
        let mut out = vec![C64::new(0.0, 0.0); ks.len()];
        let r0 = self.root_at_zero();
        let (mut k_prev, mut r_prev) = (0.0, r0);
        for &i in &order[split..] {
            r_prev = self.continue_root(k_prev, r_prev, ks[i])?;
            k_prev = ks[i];
            out[i] = r_prev;
        }
        let (mut k_prev, mut r_prev) = (0.0, r0);
        for &i in order[..split].iter().rev() {
            r_prev = self.continue_root(k_prev, r_prev, ks[i])?;
            k_prev = ks[i];
            out[i] = r_prev;
        }
        Ok(out)
    }
}

fn nearest_sign(candidate: C64, previous: C64) -> C64 {
    if (candidate - previous).norm() <= (candidate + previous).norm() {
        candidate
    } else {
        -candidate
    }
}

fn distance_to_segment(p: C64, a: f64, b: f64) -> f64 {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let x = p.re.clamp(lo, hi);
    ((p.re - x).powi(2) + p.im.powi(2)).sqrt()
}

/// ω₊(k), ω₋(k) at a single wavenumber.
pub fn omega_pm(k: f64, wn: &Wavenumbers, c: f64) -> Result<(C64, C64)> {
    let root = wn.continue_root(0.0, wn.root_at_zero(), k)?;
    Ok(wn.omegas_with_root(k, root, c))
}

/// ω± along a strictly increasing k grid. The branch is carried from grid
/// point to grid point without subdivision; a step that cannot be assigned
/// unambiguously is reported as a discontinuity.
pub fn omega_sweep(ks: &[f64], wn: &Wavenumbers, c: f64) -> Result<Vec<(C64, C64)>> {
    if ks.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("k grid must be strictly increasing".into()));
    }
    if ks.is_empty() {
        return Ok(Vec::new());
    }
    let start = ks.partition_point(|k| *k < 0.0).min(ks.len() - 1);
    let mut roots = vec![C64::new(0.0, 0.0); ks.len()];
    roots[start] = wn.continue_root(0.0, wn.root_at_zero(), ks[start])?;
    let step = |prev_k: f64, prev: C64, k: f64| -> Result<C64> {
        let cand = wn.discriminant(k).sqrt();
        let (d_plus, d_minus) = ((cand - prev).norm(), (cand + prev).norm());
        let (near, far) = if d_plus <= d_minus { (d_plus, d_minus) } else { (d_minus, d_plus) };
        if !wn.degenerate() && near > 0.25 * far {
            return Err(Error::BranchDiscontinuity { from: prev_k, to: k });
        }
        Ok(if d_plus <= d_minus { cand } else { -cand })
    };
    for i in start + 1..ks.len() {
        roots[i] = step(ks[i - 1], roots[i - 1], ks[i])?;
    }
    for i in (0..start).rev() {
        roots[i] = step(ks[i + 1], roots[i + 1], ks[i])?;
    }
    Ok(ks.iter().zip(roots).map(|(k, r)| wn.omegas_with_root(*k, r, c)).collect())
}

/// Linear expansion of both branches around k = 0:
/// `ω±(k) ≈ ω±(0) + (v_g± + iχ±) k`.
///
/// χ± = ∓(c/2)·Im(k̃₀′/√(k₁k₂)) is the imaginary part of the slope, so
/// that a mode evolves as `e^{−iω±(0)t} e^{−ikv_g t} e^{kχ t}`.
pub fn small_k(wn: &Wavenumbers, c: f64) -> Result<BranchPoint> {
    let root = wn.root_at_zero();
    if root.norm() <= 1e-12 * wn.scale() {
        return Err(Error::SingularDispersion("√(k₁k₂) vanishes: branches collide at k = 0".into()));
    }
    let ratio = wn.k0_tilde_prime / root;
    let (omega_plus, omega_minus) = wn.omegas_with_root(0.0, root, c);
    let chi_plus = -0.5 * c * ratio.im;
    Ok(BranchPoint {
        omega_plus,
        omega_minus,
        vg_plus: 0.5 * c * (1.0 - ratio.re),
        vg_minus: 0.5 * c * (1.0 + ratio.re),
        chi_plus,
        chi_minus: -chi_plus,
    })
}

/// Validity ratio of one "≪" condition; passes when `ratio < threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub description: String,
    pub ratio: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Condition {
    pub fn new(name: &str, description: &str, ratio: f64, threshold: f64) -> Self {
        Condition {
            name: name.to_string(),
            description: description.to_string(),
            ratio,
            threshold,
            pass: ratio < threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub conditions: Vec<Condition>,
    pub all_pass: bool,
}

impl ConditionReport {
    pub fn new(conditions: Vec<Condition>) -> Self {
        let all_pass = conditions.iter().all(|c| c.pass);
        ConditionReport { conditions, all_pass }
    }

    pub fn get(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Condition> {
        self.conditions.iter().filter(|c| !c.pass)
    }
}

/// Thresholds for the "≪ 1" conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RegimeThresholds {
    pub fano_mismatch: f64,
    pub detuning: f64,
    pub memory_coupling: f64,
    pub eit_transparency: f64,
    pub resonance_overlap: f64,
    pub absorption_length: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        RegimeThresholds {
            fano_mismatch: 0.1,
            detuning: 0.1,
            memory_coupling: 0.1,
            eit_transparency: 0.1,
            resonance_overlap: 0.1,
            absorption_length: 0.1,
        }
    }
}

/// a/b, with 0/0 read as 0.
fn safe_ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

fn detuning_ratio(params: &MediumParams) -> f64 {
    safe_ratio(params.mu().norm(), params.control.norm())
}

fn coupling_ratio(params: &MediumParams) -> f64 {
    params.omega_ctrl2() / params.n_g2
}

/// Approximate branches in the storage regime Ng̃² ≫ |Ω̃|².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoryRegime {
    pub point: BranchPoint,
    pub conditions: ConditionReport,
    pub warnings: Vec<String>,
}

/// Leading-order branch data for Ng̃² ≫ |Ω̃|², |ν + iγ_c/2| ≪ |Ω̃|.
///
/// The fast-branch frequency is
/// `ω₋(0) = Ng̃²(Im β₁ + (|Ω̃|²/Ng̃²) Im b − ν/Ng̃²) − iNg̃²(Re β₁ + (γ_c/2)/Ng̃² + (|Ω̃|²/Ng̃²) Re b)`,
/// i.e. the damping bracket is read as a sum of three first-order terms.
pub fn memory_regime(params: &MediumParams, thresholds: &RegimeThresholds) -> Result<MemoryRegime> {
    params.validate()?;
    let c = params.c;
    let g = params.n_g2;
    let w = params.omega_ctrl2();
    let (nu, half_gc) = (params.nu, 0.5 * params.gamma_c);
    let ResponsePoint { beta1, b, f, .. } = params.response;
    let b1sq = beta1.norm_sqr();
    let slow = c * w / g;

    let vg_plus = slow
        * (1.0 + f.re + safe_ratio(half_gc * beta1.re, w * b1sq) - safe_ratio(nu * beta1.im, w * b1sq));
    let chi_plus = slow
        * (f.im - safe_ratio(half_gc * beta1.im, w * b1sq) - safe_ratio(nu * beta1.re, w * b1sq));
    let vg_minus = c
        * (1.0 - (w / g) * f.re - safe_ratio(half_gc * beta1.re, g * b1sq)
            + safe_ratio(nu * beta1.im, w * b1sq));
    let omega_minus = C64::new(
        g * (beta1.im + (w / g) * b.im - nu / g),
        -g * (beta1.re + half_gc / g + (w / g) * b.re),
    );

    let conditions = ConditionReport::new(vec![
        Condition::new("memory_coupling", "|Ω̃|²/Ng̃²", coupling_ratio(params), thresholds.memory_coupling),
        Condition::new("detuning", "|ν + iγ_c/2|/|Ω̃|", detuning_ratio(params), thresholds.detuning),
    ]);
    let warnings = conditions
        .failures()
        .map(|c| format!("regime condition {} = {:.3e} not below {}", c.description, c.ratio, c.threshold))
        .collect();
    Ok(MemoryRegime {
        point: BranchPoint {
            omega_plus: C64::new(0.0, 0.0),
            omega_minus,
            vg_plus,
            vg_minus,
            chi_plus,
            chi_minus: -chi_plus,
        },
        conditions,
        warnings,
    })
}

/// Evaluates every validity ratio for a pulse of duration `pulse_duration`.
/// Resonance-dependent ratios (ζ, p_k) are included when a model is given.
pub fn check_conditions(
    params: &MediumParams,
    pulse_duration: f64,
    model: Option<&ResonanceModel>,
    thresholds: &RegimeThresholds,
) -> Result<ConditionReport> {
    params.validate()?;
    let mut out = Vec::new();
    if let Some(m) = model {
        let zeta = m.resonances().iter().map(|r| r.zeta.abs()).fold(0.0, f64::max);
        out.push(Condition::new("fano_mismatch", "max |ζ_v|", zeta, thresholds.fano_mismatch));
        if m.resonances().len() >= 2 {
            let p = m.overlap_ratios().into_iter().fold(0.0, f64::max);
            out.push(Condition::new(
                "resonance_overlap",
                "max Γ̃_k/ΔẼ",
                p,
                thresholds.resonance_overlap,
            ));
        }
    }
    out.push(Condition::new("detuning", "|ν + iγ_c/2|/|Ω̃|", detuning_ratio(params), thresholds.detuning));
    out.push(Condition::new("memory_coupling", "|Ω̃|²/Ng̃²", coupling_ratio(params), thresholds.memory_coupling));
    let eit = params.omega_ctrl2() * params.response.beta1.norm() * pulse_duration;
    out.push(Condition::new(
        "eit_transparency",
        "1/(|Ω̃|²|β₁|T)",
        1.0 / eit,
        thresholds.eit_transparency,
    ));
    let wn = Wavenumbers::new(params)?;
    if let Ok(bp) = small_k(&wn, params.c) {
        out.push(Condition::new(
            "absorption_length",
            "|χ₊|/v_g⁽⁺⁾",
            (bp.chi_plus / bp.vg_plus).abs(),
            thresholds.absorption_length,
        ));
    }
    Ok(ConditionReport::new(out))
}
