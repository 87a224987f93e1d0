use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use super::{ScenarioConfig, UNITS_NOTE};
use crate::dispersion::{check_conditions, memory_regime, omega_sweep, small_k, MediumParams, Wavenumbers};
use crate::error::{Error, Result};
use crate::fano::{fano_windows, Transition};
use crate::memory::{retrieve_stage, round_trip, storage_decay, write_stage};
use crate::poly::quadratic_roots;
use crate::pulse::{system_matrix, PulseState};
use crate::response::{beta1, response_point, FrequencyGrid, TwoResonanceClosedForm};
use crate::{C64, I};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.display().to_string(), source }
}

fn prepare(out: &Path) -> Result<()> {
    std::fs::create_dir_all(out).map_err(io_err(out))
}

fn write_csv(path: &Path, meta: &[String], header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut text = String::new();
    for line in meta {
        let _ = writeln!(text, "# {line}");
    }
    let _ = writeln!(text, "{}", header.join(","));
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        let _ = writeln!(text, "{}", cells.join(","));
    }
    std::fs::write(path, text).map_err(io_err(path))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Config(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(io_err(path))
}

fn params_meta(p: &MediumParams, x: f64) -> String {
    format!(
        "x = {x}, Ng̃² = {}, Ω̃ = {}{:+}i, γ_c = {}, ν = {}, γ̃₂ = {}, c = {}, g̃ = {}",
        p.n_g2, p.control.re, p.control.im, p.gamma_c, p.nu, p.gamma2, p.c, p.g_tilde
    )
}

/// Relative mismatch between {−iω₊, −iω₋} and the eigenvalues of the mode
/// matrix computed from its characteristic polynomial.
pub fn eigen_residual(params: &MediumParams, k: f64, omegas: (C64, C64)) -> f64 {
    let m = system_matrix(params, k);
    let trace = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let [e1, e2] = quadratic_roots(-trace, det);
    let (l1, l2) = (-I * omegas.0, -I * omegas.1);
    let scale = e1.norm().max(e2.norm()).max(f64::MIN_POSITIVE);
    let direct = (l1 - e1).norm().max((l2 - e2).norm());
    let swapped = (l1 - e2).norm().max((l2 - e1).norm());
    direct.min(swapped) / scale
}

/// β₁, β₁ᴸ, β₂, b, f over the x grid, one CSV per q set, plus `spectra.json`.
pub fn cmd_spectra(cfg: &ScenarioConfig, out: &Path) -> Result<Vec<PathBuf>> {
    prepare(out)?;
    let mut files = Vec::new();
    let mut sets = Vec::new();
    for (label, model) in cfg.spectrum_sets()? {
        let g = &cfg.grid;
        let grid = FrequencyGrid::uniform(&model, g.x_min, g.x_max, g.points, g.eps2)?;
        let closed = (model.resonances().len() == 2)
            .then(|| TwoResonanceClosedForm::from_model(&model))
            .transpose()?;
        let mut header = vec![
            "x", "omega", "re_beta1", "im_beta1", "re_beta1_l", "im_beta1_l", "re_beta2", "im_beta2", "re_b",
            "im_b", "re_f", "im_f",
        ];
        if closed.is_some() {
            header.extend(["re_beta1_closed", "im_beta1_closed", "re_b_closed", "im_b_closed"]);
        }
        let mut rows = Vec::with_capacity(grid.len());
        for (i, &x) in grid.x.iter().enumerate() {
            let r = response_point(&model, x, cfg.medium.gamma2)?;
            let mut row = vec![x, grid.omega(i)];
            for v in [r.beta1, r.beta1_l, r.beta2, r.b, r.f] {
                row.extend([v.re, v.im]);
            }
            if let Some(cf) = &closed {
                let (b1, b) = (cf.beta1(x), cf.b(x));
                row.extend([b1.re, b1.im, b.re, b.im]);
            }
            rows.push(row);
        }
        let resonances: Vec<String> = model
            .resonances()
            .iter()
            .map(|r| format!("(Ẽ={}, Γ̃={}, q={}, ζ={})", r.e_tilde, r.gamma_tilde, r.q, r.zeta))
            .collect();
        let meta = vec![
            UNITS_NOTE.to_string(),
            format!("resonances: {}", resonances.join(" ")),
            format!("γ̃₂ = {}, ε₂ = {}; β values are not divided by π", cfg.medium.gamma2, g.eps2),
        ];
        let name = format!("{label}.csv");
        let path = out.join(&name);
        write_csv(&path, &meta, &header, &rows)?;
        files.push(path);

        let far = [beta1(&model, -50.0, cfg.medium.gamma2)?, beta1(&model, 50.0, cfg.medium.gamma2)?];
        let pi = std::f64::consts::PI;
        sets.push(json!({
            "label": label,
            "file": name,
            "resonances": model.resonances(),
            "energy_unit": model.energy_unit(),
            "overlap_ratios": model.overlap_ratios(),
            "poles": model.poles(),
            "windows_signal": fano_windows(&model, Transition::Signal)?,
            "windows_control": fano_windows(&model, Transition::Control)?,
            "closed_form": closed,
            "asymptote": {
                "x": [-50.0, 50.0],
                "beta1_over_pi": [far[0] / pi, far[1] / pi],
                "max_deviation": far.iter().map(|b| (b / pi - 1.0).norm()).fold(0.0, f64::max),
            },
            "operating_point": {
                "x": cfg.medium.x,
                "response": response_point(&model, cfg.medium.x, cfg.medium.gamma2)?,
            },
        }));
    }
    let path = out.join("spectra.json");
    write_json(&path, &json!({ "units": UNITS_NOTE, "grid": cfg.grid, "gamma2": cfg.medium.gamma2, "sets": sets }))?;
    files.push(path);
    Ok(files)
}

/// ω±(k) sweep with an eigenvalue residual column, plus `dispersion.json`.
pub fn cmd_dispersion(cfg: &ScenarioConfig, out: &Path) -> Result<Vec<PathBuf>> {
    prepare(out)?;
    let model = cfg.model()?;
    let params = cfg.medium_params_for(&model)?;
    let wn = Wavenumbers::new(&params)?;
    let d = &cfg.dispersion;
    let ks: Vec<f64> = if d.points == 1 {
        vec![d.k_min]
    } else {
        (0..d.points)
            .map(|i| d.k_min + (d.k_max - d.k_min) * i as f64 / (d.points - 1) as f64)
            .collect()
    };
    let omegas = omega_sweep(&ks, &wn, params.c)?;
    let rows: Vec<Vec<f64>> = ks
        .iter()
        .zip(&omegas)
        .map(|(&k, &(wp, wm))| vec![k, wp.re, wp.im, wm.re, wm.im, eigen_residual(&params, k, (wp, wm))])
        .collect();
    let csv = out.join("dispersion.csv");
    write_csv(
        &csv,
        &[UNITS_NOTE.to_string(), params_meta(&params, cfg.medium.x)],
        &["k", "re_omega_plus", "im_omega_plus", "re_omega_minus", "im_omega_minus", "eig_residual"],
        &rows,
    )?;
    let bp = small_k(&wn, params.c)?;
    let regime = memory_regime(&params, &cfg.thresholds)?;
    let conditions = check_conditions(&params, cfg.write_duration(bp.vg_plus), Some(&model), &cfg.thresholds)?;
    let path = out.join("dispersion.json");
    write_json(
        &path,
        &json!({
            "units": UNITS_NOTE,
            "x": cfg.medium.x,
            "params": params,
            "wavenumbers": wn,
            "small_k": bp,
            "memory_regime": regime,
            "conditions": conditions,
            "max_eig_residual": rows.iter().map(|r| r[5]).fold(0.0, f64::max),
        }),
    )?;
    Ok(vec![csv, path])
}

fn snapshot_rows(rows: &mut Vec<Vec<f64>>, t: f64, p: &PulseState) {
    for n in 0..p.len() {
        let (a, s) = (p.alpha[n], p.sigma21[n]);
        rows.push(vec![t, p.z(n), a.re, a.im, s.re, s.im, a.norm_sqr()]);
    }
}

/// Write → store → retrieve: pulse snapshots and `report.json`.
pub fn cmd_simulate(cfg: &ScenarioConfig, out: &Path) -> Result<Vec<PathBuf>> {
    prepare(out)?;
    let model = cfg.model()?;
    let params = cfg.medium_params_for(&model)?;
    let bp = small_k(&Wavenumbers::new(&params)?, params.c)?;
    let input = cfg.input_pulse(bp.vg_plus)?;
    let schedule = cfg.schedule_for(&params, bp.vg_plus)?;
    let report = round_trip(&input, &schedule, &params, cfg.schedule.method, &cfg.thresholds)?;

    let (write, tau, retrieve) = schedule.phases()?;
    let mut rows = Vec::new();
    snapshot_rows(&mut rows, 0.0, &input);
    let stored = write_stage(&input, &params, write.duration(), &cfg.thresholds)?.stored;
    snapshot_rows(&mut rows, write.t_end, &stored);
    let held = storage_decay(&stored, &params, tau);
    snapshot_rows(&mut rows, retrieve.t_start, &held);
    let n = cfg.schedule.snapshots.max(1);
    for j in 1..=n {
        let t = retrieve.duration() * j as f64 / n as f64;
        let r = retrieve_stage(&held, &params, t, cfg.schedule.method)?;
        snapshot_rows(&mut rows, retrieve.t_start + t, &r.pulse);
    }
    let csv = out.join("snapshots.csv");
    write_csv(
        &csv,
        &[
            UNITS_NOTE.to_string(),
            params_meta(&params, cfg.medium.x),
            format!(
                "control on [0, {}], off until {}, on until {}; t is the protocol time",
                write.t_end, retrieve.t_start, retrieve.t_end
            ),
        ],
        &["t", "z", "re_alpha", "im_alpha", "re_sigma21", "im_sigma21", "abs_alpha2"],
        &rows,
    )?;
    let conditions = check_conditions(&params, write.duration(), Some(&model), &cfg.thresholds)?;
    let path = out.join("report.json");
    write_json(
        &path,
        &json!({
            "units": UNITS_NOTE,
            "x": cfg.medium.x,
            "params": params,
            "schedule": schedule,
            "conditions": conditions,
            "report": report,
        }),
    )?;
    Ok(vec![csv, path])
}

/// Validity ratios of every "≪ 1" condition as `check.json`.
pub fn cmd_check(cfg: &ScenarioConfig, out: &Path) -> Result<Vec<PathBuf>> {
    prepare(out)?;
    let model = cfg.model()?;
    let params = cfg.medium_params_for(&model)?;
    let bp = small_k(&Wavenumbers::new(&params)?, params.c)?;
    let t = cfg.write_duration(bp.vg_plus);
    let report = check_conditions(&params, t, Some(&model), &cfg.thresholds)?;
    let path = out.join("check.json");
    write_json(
        &path,
        &json!({ "units": UNITS_NOTE, "x": cfg.medium.x, "pulse_duration": t, "params": params, "report": report }),
    )?;
    Ok(vec![path])
}
