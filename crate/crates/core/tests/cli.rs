use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fano-memory"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    (header, rows)
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("scenario.toml");
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn fig3_spectra_emit_both_q_sets() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["spectra", "--preset", "fig3"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["spectra_q7_q4.csv", "spectra_q8_q6.csv", "spectra.json"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let (header, rows) = csv_rows(&dir.path().join("spectra_q7_q4.csv"));
    assert_eq!(header[0], "x");
    assert_eq!(rows.len(), 301);
    assert!(rows.iter().all(|r| r.len() == header.len() && r.iter().all(|v| v.is_finite())));
    let meta = json(&dir.path().join("spectra.json"));
    assert!(meta.is_object());
}

#[test]
fn csv_values_carry_seventeen_digits() {
    let dir = tempfile::tempdir().unwrap();
    assert!(bin(&["dispersion", "--preset", "ideal"], dir.path()).status.success());
    let text = std::fs::read_to_string(dir.path().join("dispersion.csv")).unwrap();
    let row = text.lines().find(|l| !l.starts_with('#') && !l.starts_with('k')).unwrap();
    let mantissa = row.split(',').next().unwrap().split('e').next().unwrap();
    assert_eq!(mantissa.trim_start_matches('-').replace('.', "").len(), 17);
}

#[test]
fn output_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for cmd in ["spectra", "dispersion", "simulate", "check"] {
        assert!(bin(&[cmd, "--preset", "fig3"], a.path()).status.success());
        assert!(bin(&[cmd, "--preset", "fig3"], b.path()).status.success());
    }
    let mut names: Vec<_> = std::fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() >= 8);
    for n in names {
        let x = std::fs::read(a.path().join(&n)).unwrap();
        let y = std::fs::read(b.path().join(&n)).unwrap();
        assert_eq!(x, y, "{n:?}");
    }
}

#[test]
fn dispersion_branches_solve_mode_matrix() {
    let dir = tempfile::tempdir().unwrap();
    assert!(bin(&["dispersion", "--preset", "fig3"], dir.path()).status.success());
    let (header, rows) = csv_rows(&dir.path().join("dispersion.csv"));
    let col = header.iter().position(|h| h == "eig_residual").unwrap();
    assert_eq!(rows.len(), 201);
    assert!(rows.iter().all(|r| r[col] < 1e-10));
    assert!(dir.path().join("dispersion.json").exists());
}

#[test]
fn ideal_simulation_reports_faithful_retrieval() {
    let dir = tempfile::tempdir().unwrap();
    assert!(bin(&["simulate", "--preset", "ideal"], dir.path()).status.success());
    let report = json(&dir.path().join("report.json"));
    assert!(report["report"]["fidelity"].as_f64().unwrap() > 0.999);
    assert!(report["units"].as_str().is_some());
    let (header, rows) = csv_rows(&dir.path().join("snapshots.csv"));
    assert_eq!(header[0], "t");
    assert!(!rows.is_empty());
}

#[test]
fn check_lists_conditions() {
    let dir = tempfile::tempdir().unwrap();
    assert!(bin(&["check", "--preset", "fig3"], dir.path()).status.success());
    let report = json(&dir.path().join("check.json"));
    let text = report.to_string();
    for name in ["fano_mismatch", "resonance_overlap", "memory_coupling"] {
        assert!(text.contains(name), "{name}");
    }
}

#[test]
fn single_resonance_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"
[units]
system = "scaled"

[[resonances]]
e = 0.0
gamma = 1.0
q = 5.0
zeta = 0.0

[medium]
x = 3.0
"#,
    );
    let out = dir.path().join("out");
    let o = bin(&["spectra", "--config", &cfg], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("spectra.csv").exists());
    let o = bin(&["spectra", "--preset", "custom", "--config", &cfg], &out);
    assert!(o.status.success());
}

#[test]
fn usage_and_config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(bin(&["spectra"], dir.path()).status.code(), Some(1));
    assert_eq!(bin(&["bogus", "--preset", "fig3"], dir.path()).status.code(), Some(1));
    assert_eq!(bin(&["spectra", "--preset", "fig4"], dir.path()).status.code(), Some(1));

    let no_units = write_config(dir.path(), "[[resonances]]\ne = 0.0\ngamma = 1.0\nq = 2.0\n");
    let o = bin(&["spectra", "--config", &no_units], dir.path());
    assert_eq!(o.status.code(), Some(1));

    let wrong_units = write_config(dir.path(), "[units]\nsystem = \"SI\"\n");
    assert_eq!(bin(&["check", "--config", &wrong_units], dir.path()).status.code(), Some(1));

    let unknown = write_config(dir.path(), "[units]\nsystem = \"scaled\"\n[medium]\nspeed = 2.0\n");
    assert_eq!(bin(&["check", "--config", &unknown], dir.path()).status.code(), Some(1));

    let path = write_config(dir.path(), "[units]\nsystem = \"scaled\"\n");
    assert_eq!(bin(&["check", "--preset", "fig3", "--config", &path], dir.path()).status.code(), Some(1));
    assert_eq!(bin(&["check", "--config", "/nonexistent/x.toml"], dir.path()).status.code(), Some(1));
}

#[test]
fn unresolved_pulse_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"
[units]
system = "scaled"

[[resonances]]
e = 0.0
gamma = 0.2
q = 7.0

[[resonances]]
e = 1.0
gamma = 0.2
q = 4.0

[schedule]
retrieve = 1.0

[pulse]
points = 32
width = 0.5
length = 64.0
"#,
    );
    let o = bin(&["simulate", "--config", &cfg], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn help_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(bin(&["--help"], dir.path()).status.code(), Some(0));
}
