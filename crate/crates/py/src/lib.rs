//! Python bindings for `fano_memory`.

use fano_memory::dispersion::{check_conditions, memory_regime, omega_sweep, small_k, BranchPoint, Wavenumbers};
use fano_memory::memory::round_trip;
use fano_memory::scenario::{Preset, ScenarioConfig};
use fano_memory::{Error, MediumParams, RetrievalMethod};
use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: Error) -> PyErr {
    if e.exit_code() == 2 {
        PyArithmeticError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn point_dict<'py>(py: Python<'py>, bp: &BranchPoint) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("omega_plus", bp.omega_plus)?;
    d.set_item("omega_minus", bp.omega_minus)?;
    d.set_item("vg_plus", bp.vg_plus)?;
    d.set_item("vg_minus", bp.vg_minus)?;
    d.set_item("chi_plus", bp.chi_plus)?;
    d.set_item("chi_minus", bp.chi_minus)?;
    Ok(d)
}

/// A scenario: resonances, medium, pulse and control schedule.
#[pyclass(frozen)]
struct Scenario {
    cfg: ScenarioConfig,
}

impl Scenario {
    fn params(&self) -> PyResult<MediumParams> {
        self.cfg.medium_params().map_err(to_py)
    }
}

#[pymethods]
impl Scenario {
    /// "fig3" or "ideal".
    #[staticmethod]
    fn preset(name: &str) -> PyResult<Self> {
        let p: Preset = name.parse().map_err(to_py)?;
        Ok(Scenario { cfg: ScenarioConfig::preset(p).map_err(to_py)? })
    }

    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        Ok(Scenario { cfg: ScenarioConfig::from_toml(text).map_err(to_py)? })
    }

    /// β₁, β₁ᴸ, β₂, b and f at reduced frequency x.
    #[pyo3(signature = (x, gamma2 = 0.0))]
    fn response<'py>(&self, py: Python<'py>, x: f64, gamma2: f64) -> PyResult<Bound<'py, PyDict>> {
        let model = self.cfg.model().map_err(to_py)?;
        let r = fano_memory::response::response_point(&model, x, gamma2).map_err(to_py)?;
        let d = PyDict::new(py);
        d.set_item("beta1", r.beta1)?;
        d.set_item("beta1_l", r.beta1_l)?;
        d.set_item("beta2", r.beta2)?;
        d.set_item("b", r.b)?;
        d.set_item("f", r.f)?;
        Ok(d)
    }

    /// (ω₊, ω₋) along a sorted list of wavenumbers.
    fn dispersion(&self, ks: Vec<f64>) -> PyResult<Vec<(Complex64, Complex64)>> {
        let p = self.params()?;
        let wn = Wavenumbers::new(&p).map_err(to_py)?;
        omega_sweep(&ks, &wn, p.c).map_err(to_py)
    }

    /// Exact small-k expansion of both branches.
    fn branch_point<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let p = self.params()?;
        let bp = small_k(&Wavenumbers::new(&p).map_err(to_py)?, p.c).map_err(to_py)?;
        point_dict(py, &bp)
    }

    /// Leading-order memory-regime expansion.
    fn memory_regime<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let p = self.params()?;
        let m = memory_regime(&p, &self.cfg.thresholds).map_err(to_py)?;
        let d = point_dict(py, &m.point)?;
        d.set_item("warnings", m.warnings)?;
        Ok(d)
    }

    /// Validity conditions as {name: (ratio, threshold, pass)}.
    fn check<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let p = self.params()?;
        let model = self.cfg.model().map_err(to_py)?;
        let vg = small_k(&Wavenumbers::new(&p).map_err(to_py)?, p.c).map_err(to_py)?.vg_plus;
        let t = self.cfg.write_duration(vg);
        let report = check_conditions(&p, t, Some(&model), &self.cfg.thresholds).map_err(to_py)?;
        let d = PyDict::new(py);
        for c in &report.conditions {
            d.set_item(&c.name, (c.ratio, c.threshold, c.pass))?;
        }
        Ok(d)
    }

    /// Write, store and retrieve the configured pulse.
    #[pyo3(signature = (method = "slow_branch"))]
    fn simulate<'py>(&self, py: Python<'py>, method: &str) -> PyResult<Bound<'py, PyDict>> {
        let method = match method {
            "slow_branch" => RetrievalMethod::SlowBranch,
            "expansion" => RetrievalMethod::Expansion,
            other => return Err(PyValueError::new_err(format!("unknown method {other:?}"))),
        };
        let p = self.params()?;
        let vg = small_k(&Wavenumbers::new(&p).map_err(to_py)?, p.c).map_err(to_py)?.vg_plus;
        let input = self.cfg.input_pulse(vg).map_err(to_py)?;
        let schedule = self.cfg.schedule_for(&p, vg).map_err(to_py)?;
        let r = round_trip(&input, &schedule, &p, method, &self.cfg.thresholds).map_err(to_py)?;
        let d = PyDict::new(py);
        d.set_item("fidelity", r.fidelity)?;
        d.set_item("amplitude_ratio", r.amplitude_ratio)?;
        d.set_item("delay", r.delay)?;
        d.set_item("expected_delay", r.expected_delay)?;
        d.set_item("vg_plus", r.vg_plus)?;
        d.set_item("chi_plus", r.chi_plus)?;
        d.set_item("z", (0..input.len()).map(|n| input.z(n)).collect::<Vec<_>>())?;
        d.set_item("input", input.alpha)?;
        d.set_item("output", r.retrieved.alpha)?;
        d.set_item("warnings", r.warnings)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!("Scenario(resonances={}, x={})", self.cfg.resonances.len(), self.cfg.medium.x)
    }
}

#[pymodule]
fn fano_memory_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Scenario>()?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
