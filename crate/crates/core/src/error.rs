use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("singular configuration: {0}")]
    SingularConfiguration(String),

    #[error("root finder did not converge: max residual {residual:.3e} exceeds {tolerance:.1e}")]
    RootNotConverged { residual: f64, tolerance: f64 },

    #[error("model violation: {0}")]
    ModelViolation(String),

    #[error("phase shift pole: λ = {lambda} coincides with Ẽ of resonance {index} (δ_v → ±π/2)")]
    PhaseShiftPole { lambda: f64, index: usize },

    #[error("coincident poles: cross-pole product vanishes for pole {index}")]
    CoincidentPoles { index: usize },

    #[error("singular dispersion: {0}")]
    SingularDispersion(String),

    #[error("branch discontinuity between k = {from} and k = {to}; refine the k grid")]
    BranchDiscontinuity { from: f64, to: f64 },

    #[error("step size dt = {dt:.3e} does not resolve the fastest rate (dt·rate = {product:.3e} ≥ 0.1)")]
    StepSize { dt: f64, product: f64 },

    #[error(
        "spectral tail holds {fraction:.3e} of the pulse energy (limit 1e-6); \
         use at least {suggested_points} grid points over the same domain"
    )]
    SpectralTail { fraction: f64, suggested_points: usize },

    #[error("empty pulse: {0}")]
    EmptyPulse(String),

    #[error("invalid control schedule: {0}")]
    Schedule(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Numerical failures map to CLI exit code 2; everything else is a
    /// validation error (exit code 1).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularConfiguration(_)
                | Error::RootNotConverged { .. }
                | Error::ModelViolation(_)
                | Error::PhaseShiftPole { .. }
                | Error::CoincidentPoles { .. }
                | Error::SingularDispersion(_)
                | Error::BranchDiscontinuity { .. }
                | Error::StepSize { .. }
                | Error::SpectralTail { .. }
        )
    }

    pub fn exit_code(&self) -> i32 {
        if self.is_numerical() {
            2
        } else {
            1
        }
    }
}
