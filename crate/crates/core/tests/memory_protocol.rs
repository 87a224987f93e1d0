mod common;

use fano_memory::dispersion::{memory_regime, small_k, RegimeThresholds, Wavenumbers};
use fano_memory::memory::{
    fidelity, retrieval_prefactor, retrieve_stage, round_trip, storage_decay, write_factor, write_stage,
    ControlSchedule, MemoryReport, RetrievalMethod,
};
use fano_memory::pulse::{propagate_pulse, BranchSelection, ModePropagator, PulseState};
use fano_memory::scenario::ScenarioConfig;
use fano_memory::{Error, C64};
use proptest::prelude::*;

fn run(cfg: &ScenarioConfig, method: RetrievalMethod) -> MemoryReport {
    let p = cfg.medium_params().unwrap();
    let vg = small_k(&Wavenumbers::new(&p).unwrap(), p.c).unwrap().vg_plus;
    let input = cfg.input_pulse(vg).unwrap();
    let schedule = cfg.schedule_for(&p, vg).unwrap();
    round_trip(&input, &schedule, &p, method, &cfg.thresholds).unwrap()
}

#[test]
fn ideal_expansion_is_exact_translation() {
    let cfg = ScenarioConfig::ideal();
    let p = cfg.medium_params().unwrap();
    assert!((retrieval_prefactor(&p) - 1.0).norm() < 1e-15);
    assert!((write_factor(&p) - 1.0).norm() < 1e-15);
    let regime = memory_regime(&p, &cfg.thresholds).unwrap().point;
    assert_eq!(regime.chi_plus, 0.0);

    let (w, t) = (50.0, 1e6);
    let travel = regime.vg_plus * t;
    // wide margins so the periodic images stay below 1e-8
    let length = 24.0 * w + travel;
    let amp = C64::new(0.7, 0.2);
    let input = PulseState::gaussian(2048, -length / 2.0, length, -travel / 2.0, w, amp).unwrap();
    let stored = write_stage(&input, &p, w / regime.vg_plus, &cfg.thresholds).unwrap().stored;
    let out = retrieve_stage(&stored, &p, t, RetrievalMethod::Expansion).unwrap().pulse;
    let want = PulseState::gaussian(2048, -length / 2.0, length, travel / 2.0, w, amp).unwrap();
    let err = out.alpha.iter().zip(&want.alpha).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(err < 1e-8 * amp.norm(), "{err}");
    assert!(out.sigma21.iter().all(|s| s.norm() == 0.0));
}

#[test]
fn slow_branch_is_what_survives_full_evolution() {
    let cfg = ScenarioConfig::fig3();
    let p = cfg.medium_params().unwrap();
    let vg = small_k(&Wavenumbers::new(&p).unwrap(), p.c).unwrap().vg_plus;
    let input = cfg.input_pulse(vg).unwrap();
    let stored = write_stage(&input, &p, cfg.write_duration(vg), &cfg.thresholds).unwrap().stored;
    // the fast branch decays like e^{-G Re β₁ t}; after t = 1e3 it is gone
    let t = 1e3;
    let slow = retrieve_stage(&stored, &p, t, RetrievalMethod::SlowBranch).unwrap().pulse;
    let start = PulseState { alpha: vec![C64::new(0.0, 0.0); stored.len()], ..stored.clone() };
    let full = propagate_pulse(&start, &p, t, BranchSelection::Both).unwrap();
    let scale = full.alpha.iter().map(|a| a.norm()).fold(0.0, f64::max);
    for (a, b) in slow.alpha.iter().zip(&full.alpha) {
        assert!((a - b).norm() < 1e-10 * scale);
    }
    for (a, b) in slow.sigma21.iter().zip(&full.sigma21) {
        assert!((a - b).norm() < 1e-10 * scale * p.n_g() / p.control.norm());
    }
}

#[test]
fn written_coherence_is_slow_polariton() {
    let cfg = ScenarioConfig::ideal();
    let p = cfg.medium_params().unwrap();
    let alpha = C64::new(1.0, 0.0);
    let sigma = -write_factor(&p) * p.g_tilde * alpha / p.control;
    let prop = ModePropagator::new(&p, 0.0).unwrap();
    let (slow, fast) = prop.components(alpha, sigma, 0.0);
    let w_over_g = p.omega_ctrl2() / p.n_g2;
    assert!(fast.alpha.norm() < 2.0 * w_over_g * alpha.norm(), "{fast:?}");
    assert!((slow.sigma21 - sigma).norm() < 2.0 * w_over_g * sigma.norm());
}

#[test]
fn storage_without_decoherence_only_rotates() {
    let cfg = ScenarioConfig::ideal();
    let p = cfg.medium_params().unwrap();
    let pulse = PulseState::gaussian(64, -32.0, 64.0, 0.0, 4.0, C64::new(1.0, 0.0)).unwrap();
    let stored = write_stage(&pulse, &p, 1.0, &cfg.thresholds).unwrap().stored;
    let kept = storage_decay(&stored, &p, 1e7);
    assert_eq!(kept.sigma21, stored.sigma21);

    let mut lossy = p;
    lossy.gamma_c = 2e-6;
    lossy.nu = 3e-5;
    let tau = 4e5;
    let decayed = storage_decay(&stored, &lossy, tau);
    for (a, b) in decayed.sigma21.iter().zip(&stored.sigma21) {
        assert!((a.norm() - b.norm() * (-0.5 * lossy.gamma_c * tau).exp()).abs() < 1e-14 * b.norm());
    }
    assert_eq!(decayed.time, stored.time + tau);
}

#[test]
fn storage_time_does_not_change_ideal_output() {
    let mut cfg = ScenarioConfig::ideal();
    cfg.schedule.storage = 0.0;
    let a = run(&cfg, RetrievalMethod::SlowBranch);
    cfg.schedule.storage = 3e6;
    let b = run(&cfg, RetrievalMethod::SlowBranch);
    assert_eq!(a.retrieved.alpha, b.retrieved.alpha);
    assert!(a.fidelity > 0.999);
}

#[test]
fn ideal_round_trip_is_faithful() {
    let r = run(&ScenarioConfig::ideal(), RetrievalMethod::SlowBranch);
    assert!(r.fidelity > 0.999, "{}", r.fidelity);
    assert!((r.delay / r.expected_delay - 1.0).abs() < 1e-3, "{} vs {}", r.delay, r.expected_delay);
    assert!(r.chi_plus.abs() < 1e-12 && r.absorption_length.is_none());
}

#[test]
fn fig3_round_trip_keeps_shape() {
    let cfg = ScenarioConfig::fig3();
    let slow = run(&cfg, RetrievalMethod::SlowBranch);
    let exp = run(&cfg, RetrievalMethod::Expansion);
    assert!(slow.fidelity > 0.99, "{}", slow.fidelity);
    assert!(exp.fidelity > 0.99, "{}", exp.fidelity);
    // the slow branch is damped: the output is weaker than the input
    assert!(slow.amplitude_ratio < 1.0);
    let between = fidelity(&slow.retrieved, &exp.retrieved).unwrap();
    assert!(between.fidelity > 0.99, "{between:?}");
    assert!(slow.chi_over_vg > 0.0 && slow.absorption_length.unwrap() > 0.0);
}

#[test]
fn zero_field_is_rejected() {
    let cfg = ScenarioConfig::ideal();
    let p = cfg.medium_params().unwrap();
    let mut pulse = PulseState::gaussian(64, -32.0, 64.0, 0.0, 4.0, C64::new(1.0, 0.0)).unwrap();
    pulse.alpha.iter_mut().for_each(|a| *a = C64::new(0.0, 0.0));
    let schedule = ControlSchedule::write_store_retrieve(p.control, 1.0, 1.0, 1.0).unwrap();
    let r = round_trip(&pulse, &schedule, &p, RetrievalMethod::SlowBranch, &cfg.thresholds);
    assert!(matches!(r, Err(Error::EmptyPulse(_))));
}

#[test]
fn short_write_is_flagged() {
    let cfg = ScenarioConfig::ideal();
    let p = cfg.medium_params().unwrap();
    let pulse = PulseState::gaussian(64, -32.0, 64.0, 0.0, 4.0, C64::new(1.0, 0.0)).unwrap();
    let w = write_stage(&pulse, &p, 1.0, &RegimeThresholds::default()).unwrap();
    assert!(w.eit_ratio > 1.0 && !w.warnings.is_empty());
}

fn pulse_strategy() -> impl Strategy<Value = PulseState> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 32).prop_map(|v| {
        let alpha = v.into_iter().map(|(a, b)| C64::new(a, b)).collect();
        PulseState::new(-4.0, 0.25, alpha, vec![C64::new(0.0, 0.0); 32], 0.0).unwrap()
    })
}

proptest! {
    #[test]
    fn fidelity_is_bounded(a in pulse_strategy(), b in pulse_strategy()) {
        prop_assume!(a.field_energy() > 0.0);
        let f = fidelity(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&f.fidelity));
        prop_assert!(f.delay > -a.length() / 2.0 && f.delay <= a.length() / 2.0);
    }

    #[test]
    fn shifted_copy_has_unit_fidelity(a in pulse_strategy(), shift in 0usize..32, scale in 0.1..3.0f64) {
        prop_assume!(a.field_energy() > 1e-3);
        let n = a.len();
        let mut b = a.clone();
        for i in 0..n {
            b.alpha[(i + shift) % n] = a.alpha[i] * scale;
        }
        let f = fidelity(&a, &b).unwrap();
        prop_assert!((f.fidelity - 1.0).abs() < 1e-9);
        prop_assert!((f.amplitude_ratio - scale).abs() < 1e-12 * scale);
        let want = (shift as f64 * a.dz + a.length() / 2.0).rem_euclid(a.length()) - a.length() / 2.0;
        let got = f.delay;
        let wrapped = (got - want).abs().min(a.length() - (got - want).abs());
        prop_assert!(wrapped < 1e-6, "{} vs {}", got, want);
    }
}

#[test]
fn fidelity_needs_matching_grids() {
    let a = PulseState::gaussian(64, -32.0, 64.0, 0.0, 4.0, C64::new(1.0, 0.0)).unwrap();
    let b = PulseState::gaussian(64, -30.0, 64.0, 0.0, 4.0, C64::new(1.0, 0.0)).unwrap();
    assert!(fidelity(&a, &b).is_err());
    let zero = PulseState { alpha: vec![C64::new(0.0, 0.0); 64], ..a.clone() };
    assert_eq!(fidelity(&a, &zero).unwrap().fidelity, 0.0);
    assert!(matches!(fidelity(&zero, &a), Err(Error::EmptyPulse(_))));
}
