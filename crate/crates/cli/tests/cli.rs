// Copyright 2026 The Spinact Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn mol(name: &str) -> String {
    configs().join(name).to_string_lossy().into_owned()
}

fn spinact(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinact"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn controllability_reports_dimension() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("c");
    let o = spinact(&[
        "controllability",
        "--molecule",
        &mol("three_qubit.toml"),
        "--check",
        "EYX-EXY",
        "--check",
        "EXE",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("dimension: 22"), "{text}");
    let manifest: serde_json::Value = serde_json::from_str(&read(&out, "manifest.json")).unwrap();
    assert_eq!(manifest["command"], "controllability");
    for csv in ["basis.csv", "sectors.csv"] {
        assert_eq!(read(&out, csv).lines().next(), Some("# manifest: manifest.json"));
    }
}

#[test]
fn degenerate_register_warns() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("sym.toml");
    std::fs::write(
        &path,
        r#"n_qubits = 3
species = ["F", "H", "H"]
shifts_hz = [1800.0, 400.0, 400.0]
dipolar_hz = [[1, 2, 900.0], [1, 3, 900.0], [2, 3, 600.0]]
actuators = [1]
"#,
    )
    .unwrap();
    let out = tmp.path().join("o");
    let o = spinact(&[
        "controllability",
        "--molecule",
        path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("warning:"), "{}", stderr(&o));
    let dim: usize = stdout(&o)
        .lines()
        .find_map(|l| l.strip_prefix("dimension: "))
        .and_then(|v| v.trim().parse().ok())
        .expect("dimension line");
    assert!(dim <= 22, "{dim}");
}

#[test]
fn optimize_shortfall_keeps_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let o = spinact(&[
        "optimize",
        "--molecule",
        &mol("three_qubit.toml"),
        "--gate",
        "uz-single",
        "--theta",
        "-pi/2",
        "--targets",
        "2",
        "--segments",
        "20",
        "--max-iters",
        "0",
        "--restarts",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    for f in ["pulse.txt", "trace.csv", "report.json", "manifest.json"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
}

#[test]
fn optimize_reaches_target_fidelity() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let o = spinact(&[
        "optimize",
        "--molecule",
        &mol("three_qubit.toml"),
        "--gate",
        "uz-single",
        "--theta",
        "-pi/2",
        "--targets",
        "2",
        "--goal",
        "0.995",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_str(&read(&out, "report.json")).unwrap();
    assert!(report["fidelity"].as_f64().unwrap() >= 0.99);
    assert_eq!(report["manifest"], "manifest.json");

    // The synthesized pulse feeds the other commands.
    let pulse = out.join("pulse.txt");
    let sim = tmp.path().join("s");
    let o = spinact(&[
        "simulate",
        "--molecule",
        &mol("three_qubit.toml"),
        "--gate",
        "uz-single",
        "--theta",
        "-pi/2",
        "--targets",
        "2",
        "--pulse",
        pulse.to_str().unwrap(),
        "--input",
        "EYE",
        "--pair",
        "2,3",
        "--out",
        sim.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let budget = tmp.path().join("b");
    let o = spinact(&[
        "error-budget",
        "--molecule",
        &mol("three_qubit.toml"),
        "--gate",
        "uz-single",
        "--theta",
        "-pi/2",
        "--targets",
        "2",
        "--pulse",
        pulse.to_str().unwrap(),
        "--t2",
        "20",
        "--out",
        budget.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let b: serde_json::Value = serde_json::from_str(&read(&budget, "report.json")).unwrap();
    assert!(b["relaxation_loss"].as_f64().unwrap() > 0.0);
    assert!(b["miscalibration_loss"].as_f64().unwrap() > 0.0);
}

#[test]
fn usage_errors_exit_with_two() {
    let three = mol("three_qubit.toml");
    let missing_realization = spinact(&[
        "simulate", "--molecule", &three, "--gate", "uxy", "--theta", "pi/4", "--targets", "2,3",
        "--input", "00X",
    ]);
    assert_eq!(missing_realization.status.code(), Some(2));
    let tmp = tempfile::tempdir().unwrap();
    let o = spinact(&[
        "sweep", "--molecule", &three, "--targets", "2,3", "--theta-points", "1", "--out",
        tmp.path().join("s").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("at least 2"), "{}", stderr(&o));
    let o = spinact(&["controllability", "--molecule", "/nonexistent.toml"]);
    assert_eq!(o.status.code(), Some(2));
    let o = spinact(&[
        "optimize", "--molecule", &three, "--gate", "uxy", "--theta", "pi/4", "--targets", "1,2",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn exact_simulation_and_budget() {
    let tmp = tempfile::tempdir().unwrap();
    let three = mol("three_qubit.toml");
    let sim = tmp.path().join("s");
    let o = spinact(&[
        "simulate", "--molecule", &three, "--gate", "uxy", "--theta", "pi/4", "--targets", "2,3",
        "--exact", "--input", "-10Y", "--spectator", "1", "--out", sim.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let overlaps = read(&sim, "overlaps.csv");
    let row = overlaps
        .lines()
        .find(|l| l.starts_with("1X0,"))
        .unwrap_or_else(|| panic!("{overlaps}"));
    let coeff: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert!((coeff - 1.0).abs() < 1e-9, "{row}");

    let identity = tmp.path().join("i");
    let o = spinact(&[
        "simulate", "--molecule", &three, "--gate", "uxy", "--theta", "0", "--targets", "2,3",
        "--exact", "--input", "EYE+EEY", "--out", identity.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let body = |name: &str| {
        read(&identity, name)
            .lines()
            .skip(2)
            .map(|l| l.split_once(',').unwrap().1.to_string())
            .collect::<Vec<_>>()
    };
    assert_eq!(body("reference.csv"), body("result.csv"));

    let bud = tmp.path().join("b");
    let o = spinact(&[
        "error-budget", "--molecule", &three, "--gate", "uxy", "--theta", "pi/4", "--targets",
        "2,3", "--exact", "--t2", "inf", "--epsilon", "0", "--out", bud.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let b: serde_json::Value = serde_json::from_str(&read(&bud, "report.json")).unwrap();
    for k in ["pulse_loss", "relaxation_loss", "miscalibration_loss"] {
        assert!(b[k].as_f64().unwrap().abs() < 1e-12, "{k}: {}", b[k]);
    }
}

#[test]
fn exact_sweep_has_unit_amplitudes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("s");
    let o = spinact(&[
        "sweep",
        "--molecule",
        &mol("three_qubit.toml"),
        "--targets",
        "2,3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let fits = read(&out, "fits.csv");
    let rows: Vec<&str> = fits.lines().skip(2).collect();
    assert_eq!(rows.len(), 4, "{fits}");
    for r in rows {
        let v: Vec<f64> = r.split(',').skip(1).map(|x| x.parse().unwrap()).collect();
        assert!((v[0] - 1.0).abs() < 1e-9 && (v[1] - 1.0).abs() < 1e-9, "{r}");
    }
}

#[test]
fn repeated_runs_write_identical_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let three = mol("three_qubit.toml");
    let mut bodies = Vec::new();
    for k in 0..2 {
        let out = tmp.path().join(format!("o{k}"));
        let o = spinact(&[
            "optimize", "--molecule", &three, "--gate", "uxy", "--theta", "pi/4", "--targets",
            "2,3", "--segments", "40", "--max-iters", "25", "--restarts", "2", "--min-fidelity",
            "0", "--out", out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        bodies.push((read(&out, "trace.csv"), read(&out, "pulse.txt")));
    }
    assert_eq!(bodies[0], bodies[1]);
}
