//! Exciton-Fano response, polariton dispersion and slow-light storage in a
//! Λ medium whose upper level is a set of close-lying Fano resonances.
//!
//! Modules follow the physics pipeline:
//!
//! * [`fano`]: dressed resonances, poles, phase shifts, Beutler–Fano profiles
//! * [`response`]: the complex response functions β₁, β₁ᴸ, β₂, b, f
//! * [`dispersion`]: characteristic wavenumbers and the two polariton branches
//! * [`pulse`]: per-mode field/coherence evolution and z ↔ k transforms
//! * [`memory`]: write → store → retrieve protocol and fidelity diagnostics
//! * [`scenario`]: configuration, presets and the data-emitting CLI commands
//!
//! All quantities are in scaled units: energies in units of the resonance
//! spacing ΔẼ (or Γ̃ for a single resonance), rates in units of Ng̃², c = 1.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dispersion;
pub mod error;
pub mod fano;
pub mod memory;
pub mod poly;
pub mod pulse;
pub mod quad;
pub mod response;
pub mod scenario;

pub use num_complex::Complex64 as C64;

pub use error::{Error, Result};
pub use fano::{
    effective_levels, fano_profile, fano_windows, phase_shift, poles, BareResonancePair,
    EffectiveLevels, FanoWindows, PhaseShift, PoleSet, Resonance, ResonanceModel, Tolerances,
    Transition,
};
pub use response::{FrequencyGrid, ResponsePoint, TwoResonanceClosedForm};
pub use dispersion::{BranchPoint, MediumParams, Wavenumbers};
pub use pulse::{BranchSelection, ModeSpectrum, ModeState, PulseState};
pub use memory::{ControlSchedule, ControlSegment, MemoryReport, RetrievalMethod};

/// The imaginary unit.
pub(crate) const I: C64 = C64::new(0.0, 1.0);
