//! Command line contract: exit codes, malformed configuration handling and
//! artifact provenance fields.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_adsdeform"))
}

#[test]
fn help_succeeds() {
    let out = bin().arg("help").output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("SUBCOMMANDS"));
}

#[test]
fn malformed_theta_is_config_error() {
    let out = bin()
        .args(["symsym", "--theta", "0", "--grid", "12"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "theta = 0 must exit 2");
    assert!(String::from_utf8_lossy(&out.stderr).contains("theta"));
}

#[test]
fn unknown_flag_value_is_config_error() {
    let out = bin()
        .args(["classify", "--grid", "banana"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn non_generic_mass_spin_rejected() {
    let out = bin()
        .args(["classify", "--mass", "1.0", "--spin", "1.5", "--grid", "4x4x4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unwritable_output_is_io_error() {
    let out = bin()
        .args([
            "bfield",
            "--samples",
            "3",
            "--out",
            "/nonexistent-dir/file.csv",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn torus_artifact_carries_provenance() {
    let out = bin().args(["torus", "--theta", "0.4"]).output().unwrap();
    assert!(out.status.success());
    let body: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(body["version"], env!("CARGO_PKG_VERSION"));
    assert!(body["config_hash"].as_str().unwrap().len() == 16);
    assert!(body["tolerances"]["torus_exact"].as_f64().unwrap() > 0.0);
    assert_eq!(body["payload"]["kappa"], 1.0);
    // product table closes over the listed modes with unimodular phases
    for p in body["payload"]["products"].as_array().unwrap() {
        let ph = p["phase"].as_array().unwrap();
        let norm = (ph[0].as_f64().unwrap().powi(2) + ph[1].as_f64().unwrap().powi(2)).sqrt();
        assert!((norm - 1.0).abs() < 1e-12);
    }
}

#[test]
fn classify_emits_rows_per_grid_point() {
    let out = bin()
        .args(["classify", "--grid", "5x4x3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let rows = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("phi"))
        .count();
    assert_eq!(rows, 5 * 4 * 3);
}

#[test]
fn bfield_residual_small_in_output() {
    let out = bin().args(["bfield", "--samples", "9"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for line in text.lines().filter(|l| !l.starts_with('#') && !l.starts_with("a,")) {
        let residual: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!(residual < 1e-4, "bfield residual {residual}");
    }
}

#[test]
fn symsym_reports_defects_within_tolerance() {
    let out = bin()
        .args(["symsym", "--theta", "0.3", "--grid", "16", "--window", "2.0"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let body: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let tdef = body["payload"]["trace_defect"].as_f64().unwrap();
    assert!(tdef < 1e-2, "trace defect {tdef} at the coarse CLI grid");
    let n = body["payload"]["grid"]["n"].as_u64().unwrap() as usize;
    assert_eq!(body["payload"]["samples"].as_array().unwrap().len(), n * n);
}
