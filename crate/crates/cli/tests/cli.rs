use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fjm_core::curve::ForceDeflectionCurve;
use fjm_core::fitting::CurveFitReport;
use serde_json::Value;

fn fjm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fjm"))
        .args(args)
        .env_remove("FJM_CONFIG")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn pack_writes_layout_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("layout.json");
    let run = fjm(&[
        "pack",
        "--container-radius",
        "3.0",
        "--fiber-radius",
        "1.0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    assert!(stderr(&run).contains("seed=0"));
    let v: Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["count"], 7);
    assert_eq!(v["seed"], 0);
    assert_eq!(v["layout"]["centers"].as_array().unwrap().len(), 7);
}

#[test]
fn pack_by_count_encloses_tightly() {
    let run = fjm(&["pack", "--count", "3", "--fiber-radius", "0.5"]);
    assert_eq!(code(&run), 0);
    let v: Value = serde_json::from_str(&stdout(&run)).unwrap();
    let radius = v["layout"]["container_radius"].as_f64().unwrap();
    assert!(radius <= 0.5 * 2.156, "{radius}");
}

#[test]
fn pack_rejects_bad_radii() {
    assert_eq!(
        code(&fjm(&[
            "pack",
            "--container-radius",
            "0.5",
            "--fiber-radius",
            "1.0"
        ])),
        1
    );
    assert_eq!(code(&fjm(&["pack", "--fiber-radius", "1.0"])), 1);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&fjm(&["sweep", "--bogus"])), 1);
    assert_eq!(code(&fjm(&["sweep", "--densities", ""])), 1);
    assert_eq!(code(&fjm(&["frobnicate"])), 1);
    assert_eq!(code(&fjm(&[])), 1);
    assert_eq!(code(&fjm(&["--help"])), 0);
}

#[test]
fn predict_then_fit_recovers_stiffness() {
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("j.csv");
    let run = fjm(&[
        "predict",
        "--fiber-radius",
        "0.2",
        "--fiber-count",
        "56",
        "--bundle-radius",
        "1.7",
        "--vacuum-kpa",
        "80",
        "--epsilon",
        "0.5",
        "--out",
        curve.to_str().unwrap(),
    ]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    assert!(stderr(&run).contains("zeta="));
    let parsed = ForceDeflectionCurve::read_csv(&curve).unwrap();
    assert_eq!(parsed.len(), 101);

    let run = fjm(&[
        "fit",
        "--curve",
        curve.to_str().unwrap(),
        "--state",
        "jammed",
    ]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let report: CurveFitReport = serde_json::from_str(&stdout(&run)).unwrap();
    // E I / (C1 L^3) for a 1.7 mm solid bundle
    let k = 3000.0 * std::f64::consts::FRAC_PI_4 * 1.7f64.powi(4) / (1e6 / 3.0);
    assert!((report.primary_slope / k - 1.0).abs() < 1e-3);
    assert!(report.knee_deflection.is_some());
}

#[test]
fn predict_requires_vacuum_when_jammed() {
    let run = fjm(&[
        "predict",
        "--fiber-radius",
        "0.2",
        "--fiber-count",
        "56",
        "--bundle-radius",
        "1.7",
    ]);
    assert_eq!(code(&run), 1);
    let run = fjm(&[
        "predict",
        "--fiber-radius",
        "0.2",
        "--fiber-count",
        "56",
        "--bundle-radius",
        "1.7",
        "--state",
        "unjammed",
    ]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
}

#[test]
fn fit_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let short = write(
        dir.path(),
        "short.csv",
        "deflection_mm,force_N\n0,0\n1,1\n2,2\n",
    );
    assert_eq!(
        code(&fjm(&["fit", "--curve", &short, "--state", "jammed"])),
        2
    );
    let bad = write(dir.path(), "bad.csv", "y,F\n0,0\n");
    assert_eq!(
        code(&fjm(&["fit", "--curve", &bad, "--state", "jammed"])),
        1
    );
    assert_eq!(code(&fjm(&["fit", "--curve", &short])), 1);
}

#[test]
fn manifest_fit_aggregates_runs() {
    let dir = tempfile::tempdir().unwrap();
    let line = |k: f64| {
        let mut s = String::from("deflection_mm,force_N\n");
        for i in 0..50 {
            let y = i as f64 * 0.1;
            s.push_str(&format!("{y},{}\n", k * y));
        }
        s
    };
    write(dir.path(), "j1.csv", &line(0.05));
    write(dir.path(), "j2.csv", &line(0.06));
    write(dir.path(), "j3.csv", &line(0.07));
    write(dir.path(), "u1.csv", &line(0.002));
    let manifest = write(
        dir.path(),
        "runs.json",
        r#"{"runs": [
            {"path": "j1.csv", "state": "jammed", "config_id": "a", "vacuum_pressure_kpa": 80},
            {"path": "j2.csv", "state": "jammed", "config_id": "a", "vacuum_pressure_kpa": 80},
            {"path": "j3.csv", "state": "jammed", "config_id": "a", "vacuum_pressure_kpa": 80},
            {"path": "u1.csv", "state": "unjammed", "config_id": "a"}
        ]}"#,
    );
    let run = fjm(&["fit", "--manifest", &manifest]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let v: Value = serde_json::from_str(&stdout(&run)).unwrap();
    let zeta = v["configs"][0]["zeta"].as_f64().unwrap();
    assert!((zeta - 30.0).abs() < 1e-6, "{zeta}");
}

#[test]
fn calibrate_reproduces_bundled_model() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "pairs.csv",
        "fiber_radius_mm,fiber_count,bundle_radius_mm,zeta\n0.2,56,1.7,34\n0.15,100,1.7,42\n",
    );
    let run = fjm(&["calibrate", "--input", &input]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let fitted: Value = serde_json::from_str(&stdout(&run)).unwrap();
    let bundled: Value =
        serde_json::from_str(include_str!("../../core/data/friction_calibration.json")).unwrap();
    let a = fitted["groups"][0]["slope_per_fiber"].as_f64().unwrap();
    let b = bundled["groups"][0]["slope_per_fiber"].as_f64().unwrap();
    assert!((a / b - 1.0).abs() < 1e-9);

    let one = write(
        dir.path(),
        "one.csv",
        "fiber_radius_mm,fiber_count,bundle_radius_mm,zeta\n0.2,56,1.7,34\n",
    );
    assert_eq!(code(&fjm(&["calibrate", "--input", &one])), 2);
}

#[test]
fn config_defaults_and_violations() {
    let dir = tempfile::tempdir().unwrap();
    let minimal = write(
        dir.path(),
        "min.json",
        r#"{"membrane": {"inner_diameter_mm": 4.0}}"#,
    );
    let run = fjm(&["config", "--config", &minimal]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let v: Value = serde_json::from_str(&stdout(&run)).unwrap();
    assert_eq!(v["fiber"]["youngs_modulus_mpa"], 3000.0);
    assert!((v["load_constant"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-15);

    let negative = write(
        dir.path(),
        "neg.json",
        r#"{"membrane": {"inner_diameter_mm": 4.0}, "fiber": {"radius_mm": -0.1}}"#,
    );
    let run = fjm(&["sweep", "--config", &negative]);
    assert_eq!(code(&run), 1);
    assert!(stderr(&run).contains("fiber.radius_mm"));

    let dense = write(
        dir.path(),
        "dense.json",
        r#"{"membrane": {"inner_diameter_mm": 4.0}, "sweep": {"densities": [0.5, 0.95]}}"#,
    );
    let run = fjm(&["sweep", "--config", &dense]);
    assert_eq!(code(&run), 1);
    assert!(stderr(&run).contains("sweep.densities[1]") && stderr(&run).contains("hexagonal"));

    let missing = dir.path().join("absent.json");
    assert_eq!(
        code(&fjm(&["config", "--config", missing.to_str().unwrap()])),
        1
    );
}

#[test]
fn config_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "c.json",
        r#"{"membrane": {"inner_diameter_mm": 4.0}, "seed": 9, "sweep": {"fiber_diameters_mm": [0.4], "densities": [0.56]}}"#,
    );
    let run = Command::new(env!("CARGO_BIN_EXE_fjm"))
        .arg("sweep")
        .env("FJM_CONFIG", &path)
        .output()
        .unwrap();
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    assert!(stderr(&run).contains("seed=9"));
    assert_eq!(stdout(&run).lines().count(), 2);
}

#[test]
fn sweep_selection_and_infeasibility() {
    let run = fjm(&["sweep", "--select"]);
    assert_eq!(code(&run), 0);
    assert!(stderr(&run).contains("optimum: 0.3 mm"));
    let run = fjm(&["sweep", "--min-variation-ratio", "1000000"]);
    assert_eq!(code(&run), 2);
    assert!(stderr(&run).contains("min_variation_ratio"));
    // CSV is still produced for the full grid
    assert_eq!(stdout(&run).lines().count(), 17);
}

#[test]
fn sweep_is_byte_deterministic() {
    let a = fjm(&["sweep"]);
    let b = fjm(&["sweep"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn table_small_grid() {
    let run = fjm(&[
        "table",
        "--membrane-diameter",
        "4.0",
        "--fractions",
        "0.85",
        "--diameters",
        "0.4,0.6",
    ]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let text = stdout(&run);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "bundle_diameter_mm,bundle_fraction,fiber_diameter_mm,fiber_count,packing_density"
    );
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("3.4,0.85,0.4,"));
}
