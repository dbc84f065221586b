use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nalgebra::DVector;
use serde_json::Value;
use tempfile::TempDir;

use umbilic_core::frames::arclength_reparametrize;
use umbilic_core::io::write_curve;
use umbilic_core::spaceform::SpaceForm;
use umbilic_core::synth::{oracle_circle_s3, synthesize_geodesic_sphere_s3, torus_curve_s4, SphereParams};

fn umbilic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_umbilic")).args(args).output().unwrap()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn column(csv: &Path, k: usize) -> Vec<f64> {
    fs::read_to_string(csv)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('s'))
        .map(|l| l.split(',').nth(k).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn horosphere_defaults_are_detected_as_a_horosphere() {
    let dir = TempDir::new().unwrap();
    let (curve, uhs) = (path(&dir, "h.csv"), path(&dir, "h_uhs.csv"));
    let out = umbilic(&["synthesize", "--surface", "horosphere", "--tau", "1", "-o", &curve, "--upper-halfspace", &uhs]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = umbilic(&["detect", &curve]);
    assert_eq!(out.status.code(), Some(0));
    let rep = json(&out);
    assert_eq!(rep["recovered_surface"]["kind"], "Horosphere");
    assert!((rep["C_estimate"].as_f64().unwrap() - 1.0).abs() < 0.02);

    // the upper half-space file is detected the same way
    let out = umbilic(&["detect", &uhs]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["recovered_surface"]["kind"], "Horosphere");

    let frenet = path(&dir, "f.csv");
    assert!(umbilic(&["analyze", &curve, "-o", &frenet]).status.success());
    for tau in column(Path::new(&frenet), 2).into_iter().skip(2).rev().skip(2) {
        assert!((tau - 1.0).abs() < 1e-3, "τ = {tau}");
    }
}

#[test]
fn s3_sphere_curve_has_c_three() {
    let dir = TempDir::new().unwrap();
    let curve = path(&dir, "s.csv");
    let out = umbilic(&["synthesize", "--surface", "s3-sphere", "--sigma", "0.5", "--tau", "2", "-o", &curve]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = umbilic(&["--sequential", "detect", &curve]);
    assert_eq!(out.status.code(), Some(0));
    let rep = json(&out);
    assert_eq!(rep["recovered_surface"]["kind"], "GeodesicSphereS3");
    assert!((rep["C_estimate"].as_f64().unwrap() - 3.0).abs() < 0.03);
    assert_eq!(rep["diagnostics"]["thresholds"]["c_spread_tol"], 0.01);
}

#[test]
fn small_circle_curvature_column() {
    let dir = TempDir::new().unwrap();
    let curve = path(&dir, "c.csv");
    let r = 3f64.sqrt() / 2.0;
    fs::write(&curve, write_curve(&oracle_circle_s3(r, 1e-3, 2000).unwrap())).unwrap();
    let frenet = path(&dir, "f.csv");
    let out = umbilic(&["analyze", &curve, "-o", &frenet]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("interior"));
    for k in column(Path::new(&frenet), 1) {
        assert!((k - 1.0 / 3f64.sqrt()).abs() < 1e-6, "κ = {k}");
    }
}

#[test]
fn geodesic_is_reported_with_sample_indices() {
    let dir = TempDir::new().unwrap();
    let curve = path(&dir, "g.csv");
    fs::write(&curve, write_curve(&oracle_circle_s3(1.0, 1e-3, 500).unwrap())).unwrap();
    let out = umbilic(&["analyze", &curve]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("geodesic point") && err.contains("samples 0..="), "{err}");
}

#[test]
fn perturbed_sphere_curve_exits_one() {
    // a constant-torsion curve on the σ = 1/2 sphere of S^3, pushed off the
    // sphere by 1e-2 sin(3s) along x4; τ stays near 1
    let dir = TempDir::new().unwrap();
    let curve = path(&dir, "p.csv");
    let syn = synthesize_geodesic_sphere_s3(&SphereParams::figure(1.0)).unwrap();
    let pts: Vec<DVector<f64>> = syn
        .curve
        .points()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut v = p.clone();
            v[3] += 1e-2 * (3.0 * syn.curve.s(i)).sin();
            &v / v.norm()
        })
        .collect();
    let c = arclength_reparametrize(&pts, SpaceForm::Spherical, Some(1e-3)).unwrap();
    fs::write(&curve, write_curve(&c)).unwrap();
    let out = umbilic(&["detect", &curve]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(json(&out)["verdict"], "NotUmbilical");
}

#[test]
fn rm_mode_finds_the_relation_in_s4() {
    let dir = TempDir::new().unwrap();
    let curve = path(&dir, "t.csv");
    fs::write(&curve, write_curve(&torus_curve_s4(0.5, 0.6, 1.0, 2.3, 1e-3, 4000).unwrap())).unwrap();
    let report = path(&dir, "rel.json");
    let out = umbilic(&["detect", "--mode", "rm", &curve, "-o", &report]);
    assert_eq!(out.status.code(), Some(0));
    let rel: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert!(rel["residual"].as_f64().unwrap() < 1e-4);
    assert_eq!(rel["coefficients"].as_array().unwrap().len(), 3);
}

#[test]
fn range_touching_the_blow_up_is_rejected() {
    let out = umbilic(&["synthesize", "--tau", "1", "--range", "0.5,3.1415926"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("--range") && err.contains("domain"), "{err}");
}

#[test]
fn parse_errors_carry_line_numbers() {
    let dir = TempDir::new().unwrap();
    let curve = path(&dir, "bad.csv");
    fs::write(&curve, "# model=c1 dim=4 ds=0.1\ns,x1,x2,x3,x4\n0,1,0,0,0\n0.1,oops,0,0,0\n").unwrap();
    let out = umbilic(&["detect", &curve]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));
}

#[test]
fn convert_round_trips_and_output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (path(&dir, "a.csv"), path(&dir, "b.csv"));
    let args = ["synthesize", "--surface", "equidistant", "--sigma", "1.5", "--ds", "0.01"];
    assert!(umbilic(&[&args[..], &["-o", &a]].concat()).status.success());
    assert!(umbilic(&[&args[..], &["-o", &b]].concat()).status.success());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let (u, back) = (path(&dir, "u.csv"), path(&dir, "back.csv"));
    assert!(umbilic(&["convert", &a, "-o", &u]).status.success());
    assert!(fs::read_to_string(&u).unwrap().starts_with("# model=uhs dim=3"));
    assert!(umbilic(&["convert", &u, "-o", &back]).status.success());
    for k in 1..=4 {
        for (x, y) in column(Path::new(&a), k).iter().zip(column(Path::new(&back), k)) {
            assert!((x - y).abs() < 1e-12 * (1.0 + x.abs()));
        }
    }
    let s3 = path(&dir, "s3.csv");
    fs::write(&s3, write_curve(&oracle_circle_s3(0.5, 1e-2, 10).unwrap())).unwrap();
    assert_eq!(umbilic(&["convert", &s3]).status.code(), Some(3));
}

#[test]
fn selftest_passes() {
    let out = umbilic(&["selftest"]);
    let text = String::from_utf8_lossy(&out.stdout);
    println!("{text}");
    assert!(out.status.success());
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 8);
}

#[test]
fn selftest_fails_at_a_coarse_step() {
    let out = umbilic(&["selftest", "--ds", "0.1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("[FAIL]"));
}
