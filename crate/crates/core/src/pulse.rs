//! Mode-by-mode evolution of the field amplitude α and the coherence σ₂₁.
//!
//! Each spatial Fourier mode obeys `d/dt (α, σ₂₁) = M(k) (α, σ₂₁)` with
//!
//! ```text
//! M = [ −ick − Ng̃²β₁      −Ng̃ Ω̃ β₂               ]
//!     [ −g̃ Ω̃* β₂          i(ν + iγ_c/2) − |Ω̃|²β₁ᴸ ]
//! ```
//!
//! whose eigenvalues are −iω±(k). The analytic solution splits every mode
//! into a slow (+) and fast (−) component with spectral projectors; the
//! RK4 integrator in [`ode_oracle`] is an independent check.

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::dispersion::{MediumParams, Wavenumbers};
use crate::error::{Error, Result};
use crate::{C64, I};

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeState {
    pub k: f64,
    pub alpha: C64,
    pub sigma21: C64,
}

impl ModeState {
    pub fn new(k: f64, alpha: C64, sigma21: C64) -> Self {
        ModeState { k, alpha, sigma21 }
    }

    pub fn norm(&self) -> f64 {
        (self.alpha.norm_sqr() + self.sigma21.norm_sqr()).sqrt()
    }
}

/// The 2×2 coefficient matrix of one mode, row-major.
pub fn system_matrix(params: &MediumParams, k: f64) -> [[C64; 2]; 2] {
    let r = &params.response;
    let ng = params.n_g();
    [
        [-I * params.c * k - params.n_g2 * r.beta1, -ng * params.control * r.beta2],
        [-params.g_tilde * params.control.conj() * r.beta2, I * params.mu() - params.omega_ctrl2() * r.beta1_l],
    ]
}

/// Slow/fast decomposition of a single mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModePropagator {
    pub k: f64,
    pub omega_plus: C64,
    pub omega_minus: C64,
    /// Projector onto the slow eigenvector.
    pub p_plus: [[C64; 2]; 2],
}

impl ModePropagator {
    /// Builds the propagator with a given branch of `√((k − k₁)(k − k₂))`.
    pub fn with_root(params: &MediumParams, wn: &Wavenumbers, k: f64, root: C64) -> Result<Self> {
        if root.norm() <= 1e-13 * (1.0 + wn.k1.norm() + wn.k2.norm() + k.abs()) {
            return Err(Error::SingularDispersion(format!(
                "k = {k} sits on a branch point: the two polariton branches coincide"
            )));
        }
        let c = params.c;
        let (omega_plus, omega_minus) = wn.omegas_with_root(k, root, c);
        let r = &params.response;
        let ratio = (k - wn.k0_tilde_prime) / root;
        let off = -(I / c) * r.beta2 / root;
        let p_plus = [
            [0.5 * (1.0 + ratio), off * params.n_g() * params.control],
            [off * params.g_tilde * params.control.conj(), 0.5 * (1.0 - ratio)],
        ];
        Ok(ModePropagator { k, omega_plus, omega_minus, p_plus })
    }

    /// Uses the branch continued from the k = 0 convention.
    pub fn new(params: &MediumParams, k: f64) -> Result<Self> {
        let wn = Wavenumbers::new(params)?;
        let root = wn.continue_root(0.0, wn.root_at_zero(), k)?;
        Self::with_root(params, &wn, k, root)
    }

    /// Slow and fast parts of the state after time t.
    pub fn components(&self, alpha: C64, sigma21: C64, t: f64) -> (ModeState, ModeState) {
        let p = &self.p_plus;
        let a_plus = p[0][0] * alpha + p[0][1] * sigma21;
        let s_plus = p[1][0] * alpha + p[1][1] * sigma21;
        let (a_minus, s_minus) = (alpha - a_plus, sigma21 - s_plus);
        let (ep, em) = if t == 0.0 {
            (C64::new(1.0, 0.0), C64::new(1.0, 0.0))
        } else {
            ((-I * self.omega_plus * t).exp(), (-I * self.omega_minus * t).exp())
        };
        (
            ModeState::new(self.k, ep * a_plus, ep * s_plus),
            ModeState::new(self.k, em * a_minus, em * s_minus),
        )
    }

    pub fn evolve(&self, alpha: C64, sigma21: C64, t: f64) -> ModeState {
        if t == 0.0 {
            return ModeState::new(self.k, alpha, sigma21);
        }
        let (p, m) = self.components(alpha, sigma21, t);
        ModeState::new(self.k, p.alpha + m.alpha, p.sigma21 + m.sigma21)
    }
}

/// Closed-form evolution of one mode over time t (noise terms dropped).
pub fn evolve_mode_analytic(state: ModeState, params: &MediumParams, t: f64) -> Result<ModeState> {
    Ok(ModePropagator::new(params, state.k)?.evolve(state.alpha, state.sigma21, t))
}

/// Field weights written with k̃₀ instead of k̃₀′ in the field equation,
/// `α₊ ∝ ½(1 + (k − k̃₀)/S)`. Differs from the exact solution whenever
/// ν or γ_c is nonzero; kept for comparison only.
pub fn evolve_mode_k0_tilde_weights(state: ModeState, params: &MediumParams, t: f64) -> Result<ModeState> {
    let wn = Wavenumbers::new(params)?;
    let root = wn.continue_root(0.0, wn.root_at_zero(), state.k)?;
    let mut prop = ModePropagator::with_root(params, &wn, state.k, root)?;
    prop.p_plus[0][0] = 0.5 * (1.0 + (state.k - wn.k0_tilde) / root);
    Ok(prop.evolve(state.alpha, state.sigma21, t))
}

fn mat_vec(m: &[[C64; 2]; 2], v: [C64; 2]) -> [C64; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

/// Classical RK4 integration of the mode equations with steps of at most
/// `dt`. Requires `dt·‖M‖∞ < 0.1`.
pub fn ode_oracle(state: ModeState, params: &MediumParams, t: f64, dt: f64) -> Result<ModeState> {
    params.validate()?;
    if !(dt > 0.0) || !(t >= 0.0) {
        return Err(Error::InvalidParameter("need dt > 0 and t ≥ 0".into()));
    }
    let m = system_matrix(params, state.k);
    let rate = m
        .iter()
        .map(|row| row[0].norm() + row[1].norm())
        .fold(0.0, f64::max);
    if dt * rate >= 0.1 {
        return Err(Error::StepSize { dt, product: dt * rate });
    }
    let steps = (t / dt).ceil() as usize;
    let mut y = [state.alpha, state.sigma21];
    if steps > 0 {
        let h = t / steps as f64;
        for _ in 0..steps {
            let k1 = mat_vec(&m, y);
            let k2 = mat_vec(&m, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
            let k3 = mat_vec(&m, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
            let k4 = mat_vec(&m, [y[0] + h * k3[0], y[1] + h * k3[1]]);
            for j in 0..2 {
                y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            }
        }
    }
    Ok(ModeState::new(state.k, y[0], y[1]))
}

/// Field and coherence sampled on a uniform periodic grid `z_n = z0 + n·dz`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseState {
    pub z0: f64,
    pub dz: f64,
    pub alpha: Vec<C64>,
    pub sigma21: Vec<C64>,
    pub time: f64,
}

impl PulseState {
    pub fn new(z0: f64, dz: f64, alpha: Vec<C64>, sigma21: Vec<C64>, time: f64) -> Result<Self> {
        if alpha.len() != sigma21.len() {
            return Err(Error::InvalidParameter("α and σ₂₁ must have equal length".into()));
        }
        if alpha.len() < 2 {
            return Err(Error::InvalidParameter("need at least two grid points".into()));
        }
        if !(dz > 0.0 && dz.is_finite()) || !z0.is_finite() {
            return Err(Error::InvalidParameter("grid spacing must be positive and finite".into()));
        }
        Ok(PulseState { z0, dz, alpha, sigma21, time })
    }

    /// Gaussian field `amplitude·exp(−(z − center)²/(2w²))` on `points`
    /// samples of `[z0, z0 + length)`, with zero coherence.
    pub fn gaussian(points: usize, z0: f64, length: f64, center: f64, width: f64, amplitude: C64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::InvalidParameter("pulse width must be > 0".into()));
        }
        let dz = length / points as f64;
        let alpha = (0..points)
            .map(|n| {
                let u = (z0 + n as f64 * dz - center) / width;
                amplitude * (-0.5 * u * u).exp()
            })
            .collect();
        Self::new(z0, dz, alpha, vec![ZERO; points], 0.0)
    }

    /// Domain length that keeps a Gaussian of this width clear of the
    /// periodic boundary after travelling `travel`.
    pub fn recommended_length(width: f64, travel: f64) -> f64 {
        8.0 * width + travel.abs()
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.dz * self.len() as f64
    }

    pub fn z(&self, n: usize) -> f64 {
        self.z0 + n as f64 * self.dz
    }

    pub fn field_energy(&self) -> f64 {
        self.alpha.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.dz
    }
}

/// Discrete Fourier coefficients, `α(z_n) = Σ_j c_j e^{ik_j z_n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum {
    /// Wavenumbers in FFT order; index j ≥ N/2 holds k = 2π(j − N)/L.
    pub k: Vec<f64>,
    pub alpha: Vec<C64>,
    pub sigma21: Vec<C64>,
    pub z0: f64,
    pub dz: f64,
    pub time: f64,
}

impl ModeSpectrum {
    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    pub fn mode(&self, j: usize) -> ModeState {
        ModeState::new(self.k[j], self.alpha[j], self.sigma21[j])
    }

    /// Fraction of Σ(|α_j|² + |σ_j|²) carried by |k| > k_nyquist/2.
    pub fn tail_fraction(&self) -> f64 {
        let k_half = 0.5 * std::f64::consts::PI / self.dz;
        let (mut tail, mut total) = (0.0, 0.0);
        for j in 0..self.len() {
            let e = self.alpha[j].norm_sqr() + self.sigma21[j].norm_sqr();
            total += e;
            if self.k[j].abs() > k_half {
                tail += e;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            tail / total
        }
    }
}

/// Wavenumbers of an N-point grid of spacing dz, in FFT order.
pub fn wavenumbers_for(n: usize, dz: f64) -> Vec<f64> {
    let l = n as f64 * dz;
    (0..n)
        .map(|j| {
            let signed = if j < n.div_ceil(2) { j as isize } else { j as isize - n as isize };
            2.0 * std::f64::consts::PI * signed as f64 / l
        })
        .collect()
}

fn forward(data: &[C64], k: &[f64], z0: f64) -> Vec<C64> {
    let n = data.len();
    let mut buf = data.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    buf.iter()
        .zip(k)
        .map(|(x, kj)| x * (-I * kj * z0).exp() / n as f64)
        .collect()
}

fn inverse(coeffs: &[C64], k: &[f64], z0: f64) -> Vec<C64> {
    let n = coeffs.len();
    let mut buf: Vec<C64> = coeffs.iter().zip(k).map(|(c, kj)| c * (I * kj * z0).exp()).collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    buf
}

pub fn to_kspace(pulse: &PulseState) -> ModeSpectrum {
    let k = wavenumbers_for(pulse.len(), pulse.dz);
    ModeSpectrum {
        alpha: forward(&pulse.alpha, &k, pulse.z0),
        sigma21: forward(&pulse.sigma21, &k, pulse.z0),
        k,
        z0: pulse.z0,
        dz: pulse.dz,
        time: pulse.time,
    }
}

pub fn to_zspace(modes: &ModeSpectrum) -> PulseState {
    PulseState {
        z0: modes.z0,
        dz: modes.dz,
        alpha: inverse(&modes.alpha, &modes.k, modes.z0),
        sigma21: inverse(&modes.sigma21, &modes.k, modes.z0),
        time: modes.time,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchSelection {
    Both,
    SlowOnly,
}

/// Maximum admissible share of spectral energy above half the Nyquist wavenumber.
pub const TAIL_LIMIT: f64 = 1e-6;

/// Checks the spectral tail, then evolves every mode analytically.
pub fn propagate_modes(
    modes: &ModeSpectrum,
    params: &MediumParams,
    t: f64,
    branch: BranchSelection,
) -> Result<ModeSpectrum> {
    let tail = modes.tail_fraction();
    if tail >= TAIL_LIMIT {
        return Err(Error::SpectralTail { fraction: tail, suggested_points: 2 * modes.len() });
    }
    let wn = Wavenumbers::new(params)?;
    let roots = wn.roots_for(&modes.k)?;
    let mut out = modes.clone();
    out.time = modes.time + t;
    for (j, root) in roots.into_iter().enumerate() {
        let prop = ModePropagator::with_root(params, &wn, modes.k[j], root)?;
        let m = match branch {
            BranchSelection::Both => prop.evolve(modes.alpha[j], modes.sigma21[j], t),
            BranchSelection::SlowOnly => prop.components(modes.alpha[j], modes.sigma21[j], t).0,
        };
        out.alpha[j] = m.alpha;
        out.sigma21[j] = m.sigma21;
    }
    Ok(out)
}

/// Evolves a pulse over time t in z space.
pub fn propagate_pulse(
    pulse: &PulseState,
    params: &MediumParams,
    t: f64,
    branch: BranchSelection,
) -> Result<PulseState> {
    if t == 0.0 && branch == BranchSelection::Both {
        return Ok(pulse.clone());
    }
    Ok(to_zspace(&propagate_modes(&to_kspace(pulse), params, t, branch)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::response::ResponsePoint;

    fn sample() -> MediumParams {
        let resp = ResponsePoint::from_beta1_and_b(C64::new(2.5, -0.7), C64::new(0.2, 0.1));
        MediumParams::scaled(1.0, C64::new(0.3, 0.1), 0.02, 0.03, resp)
    }

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn projector_is_idempotent() {
        let p = ModePropagator::new(&sample(), 0.4).unwrap().p_plus;
        let sq = [
            [p[0][0] * p[0][0] + p[0][1] * p[1][0], p[0][0] * p[0][1] + p[0][1] * p[1][1]],
            [p[1][0] * p[0][0] + p[1][1] * p[1][0], p[1][0] * p[0][1] + p[1][1] * p[1][1]],
        ];
        for i in 0..2 {
            for j in 0..2 {
                assert!(close(sq[i][j], p[i][j], 1e-12));
            }
        }
    }

    #[test]
    fn zero_time_is_identity() {
        let s = ModeState::new(0.7, C64::new(0.3, -1.0), C64::new(2.0, 0.5));
        assert_eq!(evolve_mode_analytic(s, &sample(), 0.0).unwrap(), s);
        assert_eq!(ode_oracle(s, &sample(), 0.0, 1e-3).unwrap(), s);
    }

    #[test]
    fn decoupled_field_decays_by_absorption() {
        let mut p = sample();
        p.control = ZERO;
        let k = 1.3;
        let s = ModeState::new(k, C64::new(1.0, 0.0), ZERO);
        let t = 0.8;
        let out = evolve_mode_analytic(s, &p, t).unwrap();
        let want = (-(I * k + p.n_g2 * p.response.beta1) * t).exp();
        assert!(close(out.alpha, want, 1e-13));
        assert!(out.sigma21.norm() < 1e-14);
    }

    #[test]
    fn analytic_matches_rk4() {
        let s = ModeState::new(-0.9, C64::new(0.3, -1.0), C64::new(2.0, 0.5));
        let a = evolve_mode_analytic(s, &sample(), 5.0).unwrap();
        let o = ode_oracle(s, &sample(), 5.0, 2e-4).unwrap();
        assert!(close(o.alpha, a.alpha, 1e-9) && close(o.sigma21, a.sigma21, 1e-9));
    }

    #[test]
    fn k0_tilde_weights_deviate_with_detuning() {
        let s = ModeState::new(0.2, C64::new(1.0, 0.0), C64::new(0.5, 0.0));
        let exact = evolve_mode_analytic(s, &sample(), 3.0).unwrap();
        let variant = evolve_mode_k0_tilde_weights(s, &sample(), 3.0).unwrap();
        assert!((exact.alpha - variant.alpha).norm() > 1e-4);
        let mut ideal = sample();
        ideal.nu = 0.0;
        ideal.gamma_c = 0.0;
        let a = evolve_mode_analytic(s, &ideal, 3.0).unwrap();
        let b = evolve_mode_k0_tilde_weights(s, &ideal, 3.0).unwrap();
        assert!(close(a.alpha, b.alpha, 1e-14));
    }

    #[test]
    fn rk4_rejects_coarse_steps() {
        let s = ModeState::new(100.0, C64::new(1.0, 0.0), ZERO);
        assert!(matches!(ode_oracle(s, &sample(), 1.0, 0.01), Err(Error::StepSize { .. })));
    }

    #[test]
    fn constant_field_is_single_mode() {
        let p = PulseState::new(-3.0, 0.25, vec![C64::new(2.0, 1.0); 16], vec![ZERO; 16], 0.0).unwrap();
        let m = to_kspace(&p);
        assert!(close(m.alpha[0], C64::new(2.0, 1.0), 1e-15));
        assert!(m.alpha[1..].iter().all(|c| c.norm() < 1e-15));
    }

    #[test]
    fn single_plane_wave_lands_on_its_wavenumber() {
        let n = 32;
        let dz = 0.3;
        let k = wavenumbers_for(n, dz);
        let z0 = 1.7;
        let alpha = (0..n).map(|i| (I * k[3] * (z0 + i as f64 * dz)).exp()).collect();
        let m = to_kspace(&PulseState::new(z0, dz, alpha, vec![ZERO; n], 0.0).unwrap());
        assert!(close(m.alpha[3], C64::new(1.0, 0.0), 1e-13));
    }

    #[test]
    fn round_trip_and_parseval() {
        let p = PulseState::gaussian(128, -20.0, 40.0, 1.0, 3.0, C64::new(0.5, 0.2)).unwrap();
        let m = to_kspace(&p);
        let back = to_zspace(&m);
        for (a, b) in p.alpha.iter().zip(&back.alpha) {
            assert!((a - b).norm() < 1e-13);
        }
        let ez: f64 = p.alpha.iter().map(|a| a.norm_sqr()).sum();
        let ek: f64 = m.alpha.iter().map(|a| a.norm_sqr()).sum::<f64>() * p.len() as f64;
        assert!((ez - ek).abs() < 1e-12 * ez);
    }

    #[test]
    fn coarse_grid_trips_tail_check() {
        let p = PulseState::gaussian(32, -20.0, 40.0, 0.0, 0.8, C64::new(1.0, 0.0)).unwrap();
        assert!(matches!(
            propagate_pulse(&p, &sample(), 1.0, BranchSelection::Both),
            Err(Error::SpectralTail { suggested_points: 64, .. })
        ));
    }
}
