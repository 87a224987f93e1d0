//! Dressed exciton resonances and their Fano structure.
//!
//! A set of resonances Ẽ_v with widths Γ̃_v and asymmetry parameters q_v
//! (signal) and q_v^L = q_v(1 + ζ_v) (control) defines two polynomials in
//! the energy λ:
//!
//! * the pole polynomial `Π(λ − Ẽ_v) − (i/2) Σ_v Γ̃_v Π_{k≠v}(λ − Ẽ_k)`,
//!   whose roots s_v (Im s_v > 0) are the complex resonance energies;
//! * the numerator polynomial `Π(λ − Ẽ_v) + ½ Σ_v q_v Γ̃_v Π_{k≠v}(λ − Ẽ_k)`,
//!   whose real roots are the Fano windows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::C64;

/// Below this (relative to the energy scale) a pole is considered to sit on
/// the real axis.
const NEAR_SINGULAR_WIDTH: f64 = 1e-6;

/// One dressed exciton level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    pub e_tilde: f64,
    pub gamma_tilde: f64,
    /// Fano asymmetry of the signal transition.
    pub q: f64,
    /// Relative mismatch ζ = (q^L − q)/q of the control transition.
    #[serde(default)]
    pub zeta: f64,
}

impl Resonance {
    pub fn new(e_tilde: f64, gamma_tilde: f64, q: f64, zeta: f64) -> Result<Self> {
        let r = Resonance { e_tilde, gamma_tilde, q, zeta };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.e_tilde.is_finite() && self.q.is_finite() && self.zeta.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite resonance {self:?}")));
        }
        if !(self.gamma_tilde > 0.0 && self.gamma_tilde.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "resonance width must be > 0, got {}",
                self.gamma_tilde
            )));
        }
        Ok(())
    }

    /// q^L = q(1 + ζ).
    pub fn q_control(&self) -> f64 {
        self.q * (1.0 + self.zeta)
    }

    pub fn q_for(&self, which: Transition) -> f64 {
        match which {
            Transition::Signal => self.q,
            Transition::Control => self.q_control(),
        }
    }
}

/// Which transition's asymmetry parameter enters a profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transition {
    Signal,
    Control,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Pole-polynomial residual, in units where the energy scale is 1.
    pub pole_residual: f64,
    /// Numerator residual at a Fano window, same units.
    pub window_residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { pole_residual: 1e-10, window_residual: 1e-8 }
    }
}

/// Complex resonance energies, ordered by real part.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoleSet {
    pub poles: Vec<C64>,
    /// Largest |P(s_v)| in scaled units.
    pub max_residual: f64,
    /// Some pole lies within a relative 1e-6 of the real axis.
    pub near_singular: bool,
}

fn energy_span(resonances: &[Resonance]) -> f64 {
    let (lo, hi) = resonances.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
        (lo.min(r.e_tilde), hi.max(r.e_tilde))
    });
    hi - lo
}

/// The natural energy unit: the spread of resonance energies for n ≥ 2,
/// otherwise the (largest) width.
fn natural_unit(resonances: &[Resonance]) -> f64 {
    let span = energy_span(resonances);
    if resonances.len() >= 2 && span > 0.0 {
        span
    } else {
        resonances.iter().map(|r| r.gamma_tilde).fold(0.0, f64::max)
    }
}

fn validate_all(resonances: &[Resonance]) -> Result<()> {
    if resonances.is_empty() {
        return Err(Error::InvalidParameter("at least one resonance is required".into()));
    }
    resonances.iter().try_for_each(Resonance::validate)
}

/// Π(s − E_k) over all k except `skip`.
fn product_except(resonances: &[Resonance], s: C64, skip: Option<usize>) -> C64 {
    resonances
        .iter()
        .enumerate()
        .filter(|(k, _)| Some(*k) != skip)
        .fold(C64::new(1.0, 0.0), |acc, (_, r)| acc * (s - r.e_tilde))
}

/// `Π(s − Ẽ_v) + ½ Σ_v q_v Γ̃_v Π_{k≠v}(s − Ẽ_k)` evaluated directly.
pub fn numerator_at(resonances: &[Resonance], which: Transition, s: C64) -> C64 {
    let interference: C64 = resonances
        .iter()
        .enumerate()
        .map(|(j, r)| 0.5 * r.q_for(which) * r.gamma_tilde * product_except(resonances, s, Some(j)))
        .sum();
    product_except(resonances, s, None) + interference
}

/// `Σ_j q_j ζ_j Γ̃_j Π_{k≠j}(s − Ẽ_k)`: the first-order change of the
/// numerator when q → q^L, times two.
pub fn mismatch_at(resonances: &[Resonance], s: C64) -> C64 {
    resonances
        .iter()
        .enumerate()
        .map(|(j, r)| r.q * r.zeta * r.gamma_tilde * product_except(resonances, s, Some(j)))
        .sum()
}

/// Pole polynomial in scaled energy `(s − e_ref)/unit`.
fn scaled_pole_poly(resonances: &[Resonance], e_ref: f64, unit: f64) -> Poly {
    let scaled: Vec<(f64, f64)> = resonances
        .iter()
        .map(|r| ((r.e_tilde - e_ref) / unit, r.gamma_tilde / unit))
        .collect();
    let product = Poly::from_roots(scaled.iter().map(|(e, _)| C64::new(*e, 0.0)));
    let widths = scaled.iter().enumerate().fold(Poly::constant(C64::new(0.0, 0.0)), |acc, (v, (_, g))| {
        let others = Poly::from_roots(
            scaled.iter().enumerate().filter(|(k, _)| *k != v).map(|(_, (e, _))| C64::new(*e, 0.0)),
        );
        acc.add(&others.scale(C64::new(*g, 0.0)))
    });
    product.add(&widths.scale(C64::new(0.0, -0.5)))
}

fn scaled_numerator_poly(resonances: &[Resonance], which: Transition, e_ref: f64, unit: f64) -> Poly {
    let scaled: Vec<(f64, f64, f64)> = resonances
        .iter()
        .map(|r| ((r.e_tilde - e_ref) / unit, r.gamma_tilde / unit, r.q_for(which)))
        .collect();
    let product = Poly::from_roots(scaled.iter().map(|(e, _, _)| C64::new(*e, 0.0)));
    scaled.iter().enumerate().fold(product, |acc, (v, (_, g, q))| {
        let others = Poly::from_roots(
            scaled.iter().enumerate().filter(|(k, _)| *k != v).map(|(_, (e, _, _))| C64::new(*e, 0.0)),
        );
        acc.add(&others.scale(C64::new(0.5 * q * g, 0.0)))
    })
}

fn reference_energy(resonances: &[Resonance]) -> f64 {
    resonances.iter().map(|r| r.e_tilde).fold(f64::INFINITY, f64::min)
}

/// Roots of the pole polynomial with default tolerances.
pub fn poles(resonances: &[Resonance]) -> Result<PoleSet> {
    poles_with(resonances, &Tolerances::default())
}

pub fn poles_with(resonances: &[Resonance], tol: &Tolerances) -> Result<PoleSet> {
    validate_all(resonances)?;
    let unit = natural_unit(resonances);
    let e_ref = reference_energy(resonances);
    let p = scaled_pole_poly(resonances, e_ref, unit);
    let scaled_roots = p.roots()?;
    let max_residual = scaled_roots.iter().map(|s| p.eval(*s).norm()).fold(0.0, f64::max);
    if !(max_residual < tol.pole_residual) {
        return Err(Error::RootNotConverged { residual: max_residual, tolerance: tol.pole_residual });
    }
    let mut poles: Vec<C64> = scaled_roots.iter().map(|s| e_ref + s * unit).collect();
    poles.sort_by(|a, b| a.re.total_cmp(&b.re));

    let scale = resonances
        .iter()
        .map(|r| r.e_tilde.abs().max(r.gamma_tilde))
        .fold(energy_span(resonances), f64::max);
    if let Some(bad) = poles.iter().find(|s| s.im <= 0.0) {
        return Err(Error::ModelViolation(format!("pole {bad} has Im s ≤ 0")));
    }
    let near_singular = poles.iter().any(|s| s.im < NEAR_SINGULAR_WIDTH * scale);
    Ok(PoleSet { poles, max_residual, near_singular })
}

/// A validated resonance set together with its poles and energy unit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResonanceModel {
    resonances: Vec<Resonance>,
    unit: f64,
    e_ref: f64,
    poles: PoleSet,
    tolerances: Tolerances,
}

impl ResonanceModel {
    pub fn new(resonances: Vec<Resonance>) -> Result<Self> {
        Self::with_tolerances(resonances, Tolerances::default())
    }

    pub fn with_tolerances(mut resonances: Vec<Resonance>, tolerances: Tolerances) -> Result<Self> {
        validate_all(&resonances)?;
        resonances.sort_by(|a, b| a.e_tilde.total_cmp(&b.e_tilde));
        let poles = poles_with(&resonances, &tolerances)?;
        Ok(ResonanceModel {
            unit: natural_unit(&resonances),
            e_ref: reference_energy(&resonances),
            resonances,
            poles,
            tolerances,
        })
    }

    /// Resonances sorted by energy.
    pub fn resonances(&self) -> &[Resonance] {
        &self.resonances
    }

    pub fn poles(&self) -> &PoleSet {
        &self.poles
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tolerances
    }

    /// ΔẼ = Ẽ_max − Ẽ_min for two or more resonances, Γ̃ for one.
    pub fn energy_unit(&self) -> f64 {
        self.unit
    }

    /// Lowest resonance energy Ẽ₁.
    pub fn reference_energy(&self) -> f64 {
        self.e_ref
    }

    /// Photon energy ω + ε₂ at dimensionless detuning x.
    pub fn energy_at(&self, x: f64) -> f64 {
        self.e_ref + x * self.unit
    }

    pub fn x_at(&self, energy: f64) -> f64 {
        (energy - self.e_ref) / self.unit
    }

    pub fn numerator(&self, which: Transition, s: C64) -> C64 {
        numerator_at(&self.resonances, which, s)
    }

    /// p_k = Γ̃_k/ΔẼ for every resonance.
    pub fn overlap_ratios(&self) -> Vec<f64> {
        self.resonances.iter().map(|r| r.gamma_tilde / self.unit).collect()
    }
}

/// Individual and total phase shifts at energy λ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseShift {
    /// δ_v ∈ (−π/2, π/2), one per resonance.
    pub per_resonance: Vec<f64>,
    /// δ ∈ (−π/2, π/2) with tan δ = Σ tan δ_v.
    pub total: f64,
    pub tan_total: f64,
}

/// tan δ_v = −(Γ̃_v/2)/(λ − Ẽ_v), i.e. π|Ũ|² written through Γ̃ = 2π|Ũ|².
pub fn phase_shift(lambda: f64, resonances: &[Resonance]) -> Result<PhaseShift> {
    validate_all(resonances)?;
    let mut tans = Vec::with_capacity(resonances.len());
    for (index, r) in resonances.iter().enumerate() {
        let d = lambda - r.e_tilde;
        if d == 0.0 {
            return Err(Error::PhaseShiftPole { lambda, index });
        }
        tans.push(-0.5 * r.gamma_tilde / d);
    }
    let tan_total: f64 = tans.iter().sum();
    Ok(PhaseShift {
        per_resonance: tans.iter().map(|t| t.atan()).collect(),
        total: tan_total.atan(),
        tan_total,
    })
}

/// z(λ) = [Σ_v |Ũ_v|²/(λ − Ẽ_v)]⁻¹ with |Ũ_v|² = Γ̃_v/2π; tan δ = −π/z.
pub fn z_function(lambda: f64, resonances: &[Resonance]) -> f64 {
    let sum: f64 = resonances
        .iter()
        .map(|r| r.gamma_tilde / (2.0 * std::f64::consts::PI) / (lambda - r.e_tilde))
        .sum();
    1.0 / sum
}

/// Beutler–Fano ratio of structured to smooth-continuum transition
/// probability at real energy λ. Always ≥ 0.
pub fn fano_profile(lambda: f64, model: &ResonanceModel, which: Transition) -> f64 {
    let l = C64::new(lambda, 0.0);
    let num = model.numerator(which, l).re;
    let den: f64 = model.poles.poles.iter().map(|s| (l - s).norm_sqr()).product();
    num * num / den
}

/// Roots of the numerator polynomial, split into real windows and complex
/// roots that do not produce a window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FanoWindows {
    pub windows: Vec<f64>,
    pub complex: Vec<C64>,
}

pub fn fano_windows(model: &ResonanceModel, which: Transition) -> Result<FanoWindows> {
    let unit = model.unit;
    let e_ref = model.e_ref;
    let p = scaled_numerator_poly(&model.resonances, which, e_ref, unit);
    let dp = p.derivative();
    let mut windows = Vec::new();
    let mut complex = Vec::new();
    for r in p.roots()? {
        // the polynomial is real: conjugate pairs have |Im| well above noise
        if r.im.abs() > 1e-7 * (1.0 + r.re.abs()) {
            complex.push(e_ref + r * unit);
            continue;
        }
        let mut x = r.re;
        for _ in 0..6 {
            let d = dp.eval(C64::new(x, 0.0)).re;
            if d == 0.0 {
                break;
            }
            let step = p.eval(C64::new(x, 0.0)).re / d;
            x -= step;
            if step.abs() < 1e-16 * (1.0 + x.abs()) {
                break;
            }
        }
        let residual = p.eval(C64::new(x, 0.0)).norm();
        if !(residual < model.tolerances.window_residual) {
            return Err(Error::RootNotConverged {
                residual,
                tolerance: model.tolerances.window_residual,
            });
        }
        windows.push(e_ref + x * unit);
    }
    windows.sort_by(f64::total_cmp);
    complex.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(FanoWindows { windows, complex })
}

/// Two bare levels coupled to the same continuum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BareResonancePair {
    pub e1: f64,
    pub e2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub delta1: f64,
    pub delta2: f64,
    /// Cross shift Δ₁₂, supplied directly.
    pub delta12: C64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveLevels {
    pub e1: f64,
    pub e2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
}

impl EffectiveLevels {
    pub fn resonances(&self, q: [f64; 2], zeta: [f64; 2]) -> Result<[Resonance; 2]> {
        Ok([
            Resonance::new(self.e1, self.gamma1, q[0], zeta[0])?,
            Resonance::new(self.e2, self.gamma2, q[1], zeta[1])?,
        ])
    }
}

/// Dressed energies and widths of two interacting resonances.
///
/// The level splitting uses `√((E₂+Δ₂−E₁−Δ₁)² + |Δ₁₂|²)` exactly as in the
/// closed form this is taken from; a 2×2 Hermitian diagonalization with
/// off-diagonal Δ₁₂ would give `4|Δ₁₂|²` instead, i.e. the formula
/// corresponds to an off-diagonal coupling of Δ₁₂/2. The dressed energies
/// are substituted once into the width formulas (no self-consistency loop).
/// For complex Δ₁₂ the squared bracket is taken as a modulus squared so the
/// widths stay real; for real Δ₁₂ this is identical to the plain square.
pub fn effective_levels(pair: &BareResonancePair) -> Result<EffectiveLevels> {
    let BareResonancePair { e1, e2, gamma1, gamma2, delta1, delta2, delta12 } = *pair;
    if gamma1 < 0.0 || gamma2 < 0.0 {
        return Err(Error::InvalidParameter("bare widths must be ≥ 0".into()));
    }
    let a1 = e1 + delta1;
    let a2 = e2 + delta2;
    let coupling2 = delta12.norm_sqr();
    let split = ((a2 - a1).powi(2) + coupling2).sqrt();
    let et1 = 0.5 * (a1 + a2 - split);
    let et2 = 0.5 * (a1 + a2 + split);

    let scale = [e1, e2, delta1, delta2, delta12.norm(), gamma1, gamma2]
        .iter()
        .fold(0.0_f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let d1 = et1 - a2;
    let d2 = et2 - a1;
    if d1.abs() <= 1e-15 * scale || d2.abs() <= 1e-15 * scale {
        return Err(Error::SingularConfiguration(format!(
            "degenerate denominators Ẽ₁ − E₂ − Δ₂ = {d1:e}, Ẽ₂ − E₁ − Δ₁ = {d2:e}"
        )));
    }
    let width = |d: f64, g_own: f64, g_other: f64| {
        let weight = d * d / (d * d + coupling2);
        let amp = C64::new(g_own.sqrt(), 0.0) + delta12 / d * g_other.sqrt();
        weight * amp.norm_sqr()
    };
    Ok(EffectiveLevels {
        e1: et1,
        e2: et2,
        gamma1: width(d1, gamma1, gamma2),
        gamma2: width(d2, gamma2, gamma1),
    })
}
