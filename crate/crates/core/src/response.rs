//! Complex response functions of the Fano medium.
//!
//! For photon energy w = ω + ε₂ every function is a sum over the poles s_v:
//!
//! ```text
//! β[A,B](w) = π (1 − i Σ_v A(s_v*) B(s_v*) /
//!                 (Im s_v · [Re s_v − w − i(γ̃₂/2 + Im s_v)] · Π_{k≠v}(s_v* − s_k)(s_v* − s_k*)))
//! ```
//!
//! with A, B the numerator polynomials built from q (signal) or q^L
//! (control): β₁ = β[q,q], β₁ᴸ = β[q^L,q^L], β₂ = β[q^L,q]. The sum is the
//! exact residue evaluation of `−i ∫ dλ profile(λ)/(λ − w − iγ̃₂/2)` over the
//! real line, which [`beta1_by_quadrature`] checks numerically.
//!
//! Arguments named `x` are dimensionless detunings,
//! `x = (ω − (Ẽ₁ − ε₂))/ΔẼ`; see [`ResonanceModel::energy_at`].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fano::{mismatch_at, ResonanceModel, Transition};
use crate::quad::{self, QuadResult};
use crate::{C64, I};

/// All response functions at one frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResponsePoint {
    pub beta1: C64,
    pub beta1_l: C64,
    pub beta2: C64,
    pub b: C64,
    pub f: C64,
}

impl ResponsePoint {
    /// Builds the point from β₁ and b through β₁ᴸ = β₁ + b, β₂ = β₁ + b/2.
    pub fn from_beta1_and_b(beta1: C64, b: C64) -> Self {
        ResponsePoint { beta1, beta1_l: beta1 + b, beta2: beta1 + b / 2.0, b, f: f_from(b, beta1) }
    }

    /// Equal Fano parameters on both transitions.
    pub fn matched(beta1: C64) -> Self {
        Self::from_beta1_and_b(beta1, C64::new(0.0, 0.0))
    }
}

/// f = b·β₁*/|β₁|².
pub fn f_from(b: C64, beta1: C64) -> C64 {
    b * beta1.conj() / beta1.norm_sqr()
}

fn check_gamma2(gamma2: f64) -> Result<()> {
    if gamma2 >= 0.0 && gamma2.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("γ̃₂ must be ≥ 0, got {gamma2}")))
    }
}

/// `Σ_v weight(s_v*) / (Im s_v · D_v(w))`.
fn pole_sum<W: Fn(C64) -> C64>(model: &ResonanceModel, w: f64, gamma2: f64, weight: W) -> Result<C64> {
    check_gamma2(gamma2)?;
    let poles = &model.poles().poles;
    let n = poles.len();
    let unit = model.energy_unit();
    let cross_floor = 1e-14 * unit.powi(2 * (n as i32 - 1));
    let mut acc = C64::new(0.0, 0.0);
    for (v, s) in poles.iter().enumerate() {
        let sc = s.conj();
        let cross: C64 = poles
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != v)
            .map(|(_, sk)| (sc - sk) * (sc - sk.conj()))
            .product();
        if n > 1 && cross.norm() <= cross_floor {
            return Err(Error::CoincidentPoles { index: v });
        }
        let den = C64::new(s.re - w, -(0.5 * gamma2 + s.im)) * cross;
        acc += weight(sc) / den / s.im;
    }
    Ok(acc)
}

fn pair_response(model: &ResonanceModel, x: f64, gamma2: f64, a: Transition, b: Transition) -> Result<C64> {
    let w = model.energy_at(x);
    let sum = pole_sum(model, w, gamma2, |s| model.numerator(a, s) * model.numerator(b, s))?;
    Ok(PI * (1.0 - I * sum))
}

/// β₁: signal-transition response.
pub fn beta1(model: &ResonanceModel, x: f64, gamma2: f64) -> Result<C64> {
    pair_response(model, x, gamma2, Transition::Signal, Transition::Signal)
}

/// β₁ᴸ: control-transition response (q → q^L).
pub fn beta1_l(model: &ResonanceModel, x: f64, gamma2: f64) -> Result<C64> {
    pair_response(model, x, gamma2, Transition::Control, Transition::Control)
}

/// β₂: mixed response with one q^L and one q numerator.
pub fn beta2(model: &ResonanceModel, x: f64, gamma2: f64) -> Result<C64> {
    pair_response(model, x, gamma2, Transition::Control, Transition::Signal)
}

/// b: first-order (in ζ) splitting between β₁ᴸ and β₁.
///
/// The ζ-weighted factor is `Σ_j q_j ζ_j Γ̃_j Π_{k≠j}(s_v* − Ẽ_k)`; the
/// denominator uses the same γ̃₂ as β₁ so that β₁ᴸ − β₁ = b + O(ζ²).
pub fn b_func(model: &ResonanceModel, x: f64, gamma2: f64) -> Result<C64> {
    let w = model.energy_at(x);
    let res = model.resonances();
    let sum = pole_sum(model, w, gamma2, |s| model.numerator(Transition::Signal, s) * mismatch_at(res, s))?;
    Ok(-I * PI * sum)
}

pub fn f_func(model: &ResonanceModel, x: f64, gamma2: f64) -> Result<C64> {
    Ok(f_from(b_func(model, x, gamma2)?, beta1(model, x, gamma2)?))
}

/// All five functions from the general pole sums.
pub fn response_point(model: &ResonanceModel, x: f64, gamma2: f64) -> Result<ResponsePoint> {
    let beta1 = beta1(model, x, gamma2)?;
    let b = b_func(model, x, gamma2)?;
    Ok(ResponsePoint {
        beta1,
        beta1_l: beta1_l(model, x, gamma2)?,
        beta2: beta2(model, x, gamma2)?,
        b,
        f: f_from(b, beta1),
    })
}

/// Closed forms for two well-separated resonances (p_k = Γ̃_k/ΔẼ ≪ 1),
/// to leading order in p_k. No γ̃₂ enters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoResonanceClosedForm {
    pub p1: f64,
    pub p2: f64,
    pub q1: f64,
    pub q2: f64,
    pub zeta1: f64,
    pub zeta2: f64,
}

impl TwoResonanceClosedForm {
    pub fn from_model(model: &ResonanceModel) -> Result<Self> {
        let [r1, r2] = model.resonances() else {
            return Err(Error::InvalidParameter(format!(
                "closed form needs exactly two resonances, got {}",
                model.resonances().len()
            )));
        };
        let unit = model.energy_unit();
        Ok(TwoResonanceClosedForm {
            p1: r1.gamma_tilde / unit,
            p2: r2.gamma_tilde / unit,
            q1: r1.q,
            q2: r2.q,
            zeta1: r1.zeta,
            zeta2: r2.zeta,
        })
    }

    fn denominators(&self, x: f64) -> (C64, C64) {
        (
            C64::new(x, self.p1 * (x + 0.5)),
            C64::new(x - 1.0, -self.p2 * (x - 1.5)),
        )
    }

    pub fn beta1(&self, x: f64) -> C64 {
        let (d1, d2) = self.denominators(x);
        let a1 = (1.0 + I * self.q1).powi(2);
        let a2 = (1.0 + I * self.q2).powi(2);
        PI * (1.0 - I * (self.p1 / 2.0) * a1 / d1 - I * (self.p2 / 2.0) * a2 / d2)
    }

    pub fn b(&self, x: f64) -> C64 {
        let (d1, d2) = self.denominators(x);
        PI * (self.p1 * self.q1 * (1.0 + I * self.q1) / d1 * self.zeta1
            + self.p2 * self.q2 * (1.0 + I * self.q2) / d2 * self.zeta2)
    }

    /// β₁ᴸ and β₂ follow from the first-order relations.
    pub fn point(&self, x: f64) -> ResponsePoint {
        ResponsePoint::from_beta1_and_b(self.beta1(x), self.b(x))
    }
}

/// Strictly increasing dimensionless frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyGrid {
    pub x: Vec<f64>,
    /// Ẽ₁
    pub reference_energy: f64,
    /// ΔẼ
    pub energy_unit: f64,
    pub eps2: f64,
}

impl FrequencyGrid {
    pub fn uniform(model: &ResonanceModel, x_min: f64, x_max: f64, points: usize, eps2: f64) -> Result<Self> {
        if points == 0 {
            return Err(Error::InvalidParameter("frequency grid is empty".into()));
        }
        if points > 1 && !(x_max > x_min) {
            return Err(Error::InvalidParameter(format!("x_max {x_max} must exceed x_min {x_min}")));
        }
        let step = if points > 1 { (x_max - x_min) / (points - 1) as f64 } else { 0.0 };
        Self::from_points(model, (0..points).map(|i| x_min + step * i as f64).collect(), eps2)
    }

    pub fn from_points(model: &ResonanceModel, x: Vec<f64>, eps2: f64) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::InvalidParameter("frequency grid is empty".into()));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("frequency grid must be strictly increasing".into()));
        }
        Ok(FrequencyGrid {
            x,
            reference_energy: model.reference_energy(),
            energy_unit: model.energy_unit(),
            eps2,
        })
    }

    /// Signal carrier frequency ω at grid point `i`.
    pub fn omega(&self, i: usize) -> f64 {
        self.reference_energy + self.x[i] * self.energy_unit - self.eps2
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

/// β₁ from direct λ-integration of the Fano kernel,
/// `−i ∫ dλ profile(λ)/(λ − w − iγ̃₂/2)` over
/// `[Ẽ₁ − half_range·ΔẼ, Ẽₙ + half_range·ΔẼ]`.
///
/// γ̃₂ must be positive: at γ̃₂ = 0 the kernel has a pole on the path.
pub fn beta1_by_quadrature(
    model: &ResonanceModel,
    x: f64,
    gamma2: f64,
    half_range: f64,
    abs_tol: f64,
) -> Result<QuadResult> {
    if !(gamma2 > 0.0) {
        return Err(Error::InvalidParameter("quadrature oracle needs γ̃₂ > 0".into()));
    }
    let w = model.energy_at(x);
    let unit = model.energy_unit();
    let res = model.resonances();
    let lo = res[0].e_tilde - half_range * unit;
    let hi = res[res.len() - 1].e_tilde + half_range * unit;
    let eta = 0.5 * gamma2;
    let mut breaks: Vec<f64> = res.iter().map(|r| r.e_tilde).collect();
    breaks.push(w);
    let integrand = |l: f64| {
        let p = crate::fano::fano_profile(l, model, Transition::Signal);
        C64::new(p, 0.0) / C64::new(l - w, -eta)
    };
    let r = quad::integrate(integrand, lo, hi, &breaks, abs_tol, 0.0, 200_000);
    Ok(QuadResult { value: -I * r.value, ..r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fano::Resonance;

    fn fig3(q1: f64, q2: f64) -> ResonanceModel {
        ResonanceModel::new(vec![
            Resonance::new(0.0, 0.2, q1, 0.1).unwrap(),
            Resonance::new(1.0, 0.2, q2, 0.1).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn single_resonance_beta1_closed_form() {
        // β₁ = π(1 − i (Γ/2)(q − i)² / (Ẽ − w − i(γ₂ + Γ)/2))
        let (e, g, q, g2) = (0.4, 1.0, 5.0, 0.3);
        let m = ResonanceModel::new(vec![Resonance::new(e, g, q, 0.0).unwrap()]).unwrap();
        for &x in &[-3.0, 0.0, 0.2, 4.0] {
            let w = m.energy_at(x);
            let want = PI * (1.0 - I * (g / 2.0) * (q - I).powi(2) / C64::new(e - w, -(g2 + g) / 2.0));
            let got = beta1(&m, x, g2).unwrap();
            assert!((got - want).norm() < 1e-12 * want.norm());
        }
    }

    #[test]
    fn matched_q_collapses_all_functions() {
        let m = ResonanceModel::new(vec![
            Resonance::new(0.0, 0.2, 7.0, 0.0).unwrap(),
            Resonance::new(1.0, 0.2, 4.0, 0.0).unwrap(),
        ])
        .unwrap();
        let p = response_point(&m, 0.37, 0.05).unwrap();
        assert_eq!(p.b, C64::new(0.0, 0.0));
        assert_eq!(p.beta1_l, p.beta1);
        assert_eq!(p.beta2, p.beta1);
        assert_eq!(p.f, C64::new(0.0, 0.0));
    }

    #[test]
    fn f_is_b_over_real_beta1() {
        let b = C64::new(0.3, -0.2);
        assert!((f_from(b, C64::new(2.5, 0.0)) - b / 2.5).norm() < 1e-16);
    }

    #[test]
    fn closed_form_first_order_relations() {
        let cf = TwoResonanceClosedForm::from_model(&fig3(7.0, 4.0)).unwrap();
        assert_eq!(cf.p1, 0.2);
        let p = cf.point(0.5);
        assert!((p.beta1_l - p.beta1 - p.b).norm() < 1e-13);
        assert!((p.beta2 - p.beta1 - p.b / 2.0).norm() < 1e-13);
    }

    #[test]
    fn closed_form_requires_two_resonances() {
        let m = ResonanceModel::new(vec![Resonance::new(0.0, 1.0, 1.0, 0.0).unwrap()]).unwrap();
        assert!(TwoResonanceClosedForm::from_model(&m).is_err());
    }

    #[test]
    fn negative_gamma2_is_rejected() {
        assert!(beta1(&fig3(7.0, 4.0), 0.0, -1.0).is_err());
        assert!(beta1_by_quadrature(&fig3(7.0, 4.0), 0.0, 0.0, 50.0, 1e-8).is_err());
    }

    #[test]
    fn grid_validation() {
        let m = fig3(7.0, 4.0);
        assert!(FrequencyGrid::uniform(&m, -1.0, 2.0, 0, 0.0).is_err());
        assert!(FrequencyGrid::from_points(&m, vec![0.0, 0.0], 0.0).is_err());
        let g = FrequencyGrid::uniform(&m, -1.0, 2.0, 4, 0.25).unwrap();
        assert_eq!(g.x, vec![-1.0, 0.0, 1.0, 2.0]);
        assert!((g.omega(2) - (1.0 - 0.25)).abs() < 1e-15);
    }
}
