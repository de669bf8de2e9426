//! End-to-end tests of the `sqtrap` binary: artifact shapes, exit codes,
//! and byte determinism.
#![allow(clippy::approx_constant)] // six-digit tabulated roots appear as literals

use std::process::{Command, Output};

fn sqtrap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqtrap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = sqtrap(args);
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn table1_contains_the_reference_rows() {
    let text = stdout(&["table1"]);
    let rows: serde_json::Value = serde_json::from_str(&text).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0]["l"], 1);
    assert_eq!(rows[0]["nprime"], 4);
    let root = rows[0]["omega_tau"].as_f64().unwrap();
    assert!((root - 3.14159).abs() < 1e-4, "omega_tau = {root}");
    // winding and both rule predictions are part of the record
    for row in rows {
        assert!(row["winding"].is_number());
        assert!(row["theta_rule_a"].is_number());
        assert!(row["theta_rule_b"].is_number());
    }
}

#[test]
fn cis_emits_the_documented_keys() {
    let text = stdout(&["cis", "--l", "1", "--nprime", "8"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in [
        "l",
        "nprime",
        "epsilon",
        "omega_tau",
        "tau_prime_over_tau",
        "theta_cycle",
        "lambda",
        "rule",
    ] {
        assert!(!v[key].is_null(), "missing key {key}");
    }
    assert_eq!(v["rule"], "b");
    assert!((v["lambda"].as_f64().unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-5);
}

#[test]
fn cis_degenerate_target_exits_one_with_diagnostic() {
    // l = N' puts the cyclic target on the resonance boundary
    let out = sqtrap(&["cis", "--l", "2", "--nprime", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("resonance boundary"), "stderr: {err}");
}

#[test]
fn usage_errors_exit_two() {
    let out = sqtrap(&["cis", "--l", "1", "--nprime", "4", "--bogus-flag"]);
    assert_eq!(out.status.code(), Some(2));
    let out = sqtrap(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn byte_identical_invocations() {
    for args in [
        vec!["table1"],
        vec![
            "stability",
            "--omega1",
            "0:3.2:0.8",
            "--omega2",
            "0:3.2:0.8",
        ],
        vec!["gminus", "--l", "1", "--nprime", "3", "--periods", "2"],
    ] {
        let a = stdout(&args);
        let b = stdout(&args);
        assert_eq!(a, b, "output of {args:?} not deterministic");
    }
}

#[test]
fn gminus_trace_has_the_cycle_period() {
    let text = stdout(&["gminus", "--l", "1", "--nprime", "4", "--periods", "4"]);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,g_minus,g_zero,g_plus");
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 4 * 256 + 1);
    // N' = 4 has tau' = 2 tau: row k and row k + 2*256 must match
    for k in 0..(2 * 256) {
        let (a, b) = (&rows[k], &rows[k + 2 * 256]);
        assert!((a[0] + 2.0 - b[0]).abs() < 1e-12);
        for c in 1..4 {
            assert!(
                (a[c] - b[c]).abs() <= 1e-8 * a[c].abs().max(1.0),
                "column {c} at t = {}",
                a[0]
            );
        }
    }
    // the matched invariant touches m*g- = 1 within the trace
    let min_dev = rows
        .iter()
        .map(|r| (r[1] - 1.0).abs())
        .fold(f64::INFINITY, f64::min);
    assert!(
        min_dev < 1e-3,
        "m*g- never approaches 1 (min dev {min_dev})"
    );
}

#[test]
fn stability_map_is_row_major_with_omega1_fastest() {
    let text = stdout(&["stability", "--omega1", "0:2:1", "--omega2", "0:1:1"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "omega1_tau,omega2_tau,lambda_x,lambda_y,x_stable,y_stable"
    );
    let first: Vec<&str> = lines[1].split(',').collect();
    let second: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(first[0].parse::<f64>().unwrap(), 0.0);
    assert_eq!(second[0].parse::<f64>().unwrap(), 1.0);
    assert_eq!(first[1], second[1]); // omega2 constant along a row
    assert_eq!(lines.len(), 1 + 3 * 2);
}

#[test]
fn floquet_reads_profile_document_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("profile.json");
    std::fs::write(
        &path,
        r#"{"tau": 1.0, "tau2": 0.25, "omega1": 3.14159265, "omega2": 3.14159265, "axis": "x"}"#,
    )
    .unwrap();
    let text = stdout(&["floquet", "--profile", path.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["stable"], true);
    assert!(v["lambda"].as_f64().unwrap().abs() < 1e-6);
    assert!((v["phi"].as_f64().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-6);
    assert!((v["beta2"].as_f64().unwrap() - 2.30130).abs() < 1e-5);
    // unstable profile reports a null phi
    let ypath = dir.path().join("unstable.json");
    std::fs::write(
        &ypath,
        r#"{"tau": 1.0, "tau2": 0.0, "omega1": 1.0, "omega2": 0.0, "axis": "y"}"#,
    )
    .unwrap();
    let text = stdout(&["floquet", "--profile", ypath.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["stable"], false);
    assert!(v["phi"].is_null());
}

#[test]
fn floquet_rejects_invalid_profile_documents() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    // 2*tau2 == tau violates the segment layout
    std::fs::write(
        &path,
        r#"{"tau": 1.0, "tau2": 0.5, "omega1": 1.0, "omega2": 1.0, "axis": "x"}"#,
    )
    .unwrap();
    let out = sqtrap(&["floquet", "--profile", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tau2"));
}

#[test]
fn interfere_classifies_the_doubled_pair_destructive() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exp.json");
    std::fs::write(
        &path,
        r#"{"D_m": 0.06, "v_mps": 5e6,
            "path1": {"l": 1, "nprime": 8, "phi1_V": 1.0, "phi2_V": -1.0},
            "path2": {"l": 1, "nprime": 4, "phi1_V": 3.1, "phi2_V": -3.1}}"#,
    )
    .unwrap();
    let text = stdout(&["interfere", "--config", path.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["classification"], "destructive");
    assert!((v["theta1"].as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-6);
    assert!((v["theta2"].as_f64().unwrap() - 2.0 * std::f64::consts::PI).abs() < 1e-6);
    assert!(v["fringe_intensity"].as_f64().unwrap() < 1e-10);
    assert!(v["si"]["path1"]["implied_gap_m"]["halved"].is_number());
}

#[test]
fn interfere_rejects_bad_voltage_signs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"D_m": 0.06, "v_mps": 5e6,
            "path1": {"l": 1, "nprime": 8, "phi1_V": -1.0, "phi2_V": 1.0},
            "path2": {"l": 1, "nprime": 4, "phi1_V": 3.1, "phi2_V": -3.1}}"#,
    )
    .unwrap();
    let out = sqtrap(&["interfere", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("phi1_V > 0"));
}

#[test]
fn estimate_reference_numbers() {
    let text = stdout(&[
        "estimate", "--D", "0.06", "--d", "0.001", "--v", "5e6", "--l", "1", "--nprime", "4",
    ]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["tau_s"].as_f64().unwrap(), 6e-9);
    assert_eq!(v["tau_s_full_period_rule"].as_f64().unwrap(), 3e-9);
    let omega = v["omega_rad_per_s"].as_f64().unwrap();
    assert!((omega - 5e8).abs() / 5e8 < 0.05);
    let halved = v["phi_abs_V"]["halved"].as_f64().unwrap();
    let plain = v["phi_abs_V"]["plain"].as_f64().unwrap();
    // both values carry nine-significant-digit emission rounding
    assert!((halved / plain - 2.0).abs() < 1e-7);
    assert!(halved > 0.2 && halved < 5.0);
}

#[test]
fn berry_reference_point() {
    let text = stdout(&["berry", "--n", "0", "--l", "1", "--nprime", "4"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["chi_over_pi"].as_f64().unwrap(), -0.5);
}

#[test]
fn density_slice_header_and_normalization() {
    let text = stdout(&[
        "density", "--l", "1", "--nprime", "4", "--n", "0", "--time", "0.5",
    ]);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "q,re,im,abs2");
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 257);
    // trapezoid over the emitted slice integrates |psi|^2 to 1
    let mut total = 0.0;
    for w in rows.windows(2) {
        total += 0.5 * (w[0][3] + w[1][3]) * (w[1][0] - w[0][0]);
    }
    assert!((total - 1.0).abs() < 1e-4, "slice integrates to {total}");
}

#[test]
fn verify_runs_the_whole_suite() {
    let text = stdout(&["verify"]);
    let passes = text.lines().filter(|l| l.contains("PASS")).count();
    assert_eq!(passes, 11, "output:\n{text}");
    assert!(!text.contains("FAIL"));
}
