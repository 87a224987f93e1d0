#![allow(dead_code)]

use fano_memory::{MediumParams, ResponsePoint, C64};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex(r: &mut impl Rng, scale: f64) -> C64 {
    C64::new(r.gen_range(-scale..scale), r.gen_range(-scale..scale))
}

/// Absorbing medium (Re β₁ > 0) with generic detuning, decoherence and
/// Fano mismatch.
pub fn random_params(r: &mut impl Rng) -> MediumParams {
    let beta1 = C64::new(r.gen_range(0.3..3.0), r.gen_range(-2.0..2.0));
    let b = complex(r, 0.3);
    let control = C64::from_polar(r.gen_range(0.05..1.0), r.gen_range(0.0..std::f64::consts::TAU));
    MediumParams {
        n_g2: r.gen_range(0.5..2.0),
        control,
        gamma_c: r.gen_range(0.0..0.2),
        nu: r.gen_range(-0.2..0.2),
        gamma2: 0.0,
        c: 1.0,
        g_tilde: r.gen_range(0.5..1.5),
        response: ResponsePoint::from_beta1_and_b(beta1, b),
    }
}

pub fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}
