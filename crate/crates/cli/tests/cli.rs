//! End-to-end runs of the `vbslab` binary.

use std::path::Path;
use std::process::{Command, Output};

fn vbslab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vbslab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn table(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn cell(row: &[String], header: &[String], name: &str) -> f64 {
    let k = header.iter().position(|h| h == name).unwrap();
    if row[k] == "inf" {
        f64::INFINITY
    } else {
        row[k].parse().unwrap()
    }
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn sweep_writes_the_expected_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let status = vbslab(&[
        "sweep-phi", "--phi-min", "-1", "--phi-max", "1", "--steps", "9", "--n-list", "4,8",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(status.status.code(), Some(0), "{}", String::from_utf8_lossy(&status.stderr));
    let text = read(&out);
    assert!(!text.contains("NaN") && !text.contains("nan"));
    let (header, rows) = table(&text);
    assert_eq!(
        header,
        ["phi", "xi_c_closed", "xi_c_spectral", "xi_c_fit", "xi_e_closed", "xi_e_fit", "le_n4", "le_n8"]
    );
    assert_eq!(rows.len(), 9);
    // grid order
    let phis: Vec<f64> = rows.iter().map(|r| cell(r, &header, "phi")).collect();
    assert!(phis.windows(2).all(|w| w[0] < w[1]));

    let zero = &rows[4];
    assert_eq!(cell(zero, &header, "phi"), 0.0);
    let want = 1.0 / 3f64.ln();
    for col in ["xi_c_closed", "xi_c_spectral", "xi_c_fit"] {
        assert!((cell(zero, &header, col) - want).abs() < 1e-9, "{col}");
    }
    assert_eq!(zero[header.iter().position(|h| h == "xi_e_closed").unwrap()], "inf");
    assert_eq!(zero[header.iter().position(|h| h == "xi_e_fit").unwrap()], "inf");

    let one = &rows[8];
    assert!((cell(one, &header, "xi_e_fit") - cell(one, &header, "xi_e_closed")).abs() < 1e-3);

    for k in 0..9 {
        for col in ["xi_c_closed", "xi_c_spectral", "xi_c_fit", "xi_e_closed", "xi_e_fit"] {
            let (a, b) = (cell(&rows[k], &header, col), cell(&rows[8 - k], &header, col));
            assert!(a == b || (a - b).abs() < 1e-9, "{col} at row {k}");
        }
    }
}

#[test]
fn sweep_is_deterministic() {
    let args = ["sweep-phi", "--steps", "7", "--n-list", "2:5", "--seed", "3"];
    let a = vbslab(&args);
    let b = vbslab(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.cfg");
    let out = dir.path().join("from_file.csv");
    std::fs::write(
        &cfg,
        format!("# small grid\nphi-min = 0.2\nphi-max = 0.6\nsteps = 3\nn-list = 4\nout = {}\n", out.display()),
    )
    .unwrap();
    let status = vbslab(&["sweep-phi", "--config", cfg.to_str().unwrap(), "--steps", "5"]);
    assert_eq!(status.status.code(), Some(0), "{}", String::from_utf8_lossy(&status.stderr));
    let (header, rows) = table(&read(&out));
    assert_eq!(rows.len(), 5);
    assert_eq!(cell(&rows[0], &header, "phi"), 0.2);
    assert_eq!(header.last().unwrap(), "le_n4");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["sweep-phi", "--steps", "1"],
        vec!["sweep-phi", "--phi-min", "1", "--phi-max", "0"],
        vec!["sweep-phi", "--n-list", "0"],
        vec!["sweep-phi", "--out", "/nonexistent-dir/x.csv", "--steps", "2"],
        vec!["sweep-phi", "--config", "/nonexistent.cfg"],
        vec!["verify", "--level", "slow"],
        vec!["heisenberg-le", "--n-max", "6"],
        vec!["string-order", "--model", "deformed"],
        vec!["no-such-command"],
    ] {
        let out = vbslab(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn verify_fast_passes() {
    let out = vbslab(&["verify", "--level", "fast"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS") || l.starts_with("FAIL")).count(), 10);
}

#[test]
fn tampered_pauli_basis_fails_verify() {
    let out = vbslab(&["verify", "--level", "fast", "--pauli-scale", "1.001"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(1));
    assert!(text.contains("failed criteria"));
    assert!(text.contains("R(1) = diag(3,-1,-1,-1)"));
}

#[test]
fn heisenberg_table() {
    let out = vbslab(&["heisenberg-le", "--n-max", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = table(&String::from_utf8_lossy(&out.stdout));
    assert_eq!(header, ["n", "le", "gap"]);
    assert_eq!(rows.len(), 4);
    for r in &rows {
        assert!((cell(r, &header, "le") - 1.0).abs() < 1e-6);
        assert!(cell(r, &header, "gap") > 0.0);
    }
}

#[test]
fn string_order_table() {
    let out = vbslab(&["string-order", "--model", "aklt", "--n-list", "2:5"]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = table(&String::from_utf8_lossy(&out.stdout));
    assert_eq!(rows.len(), 4);
    for r in &rows {
        assert!((cell(r, &header, "string_order").abs() - 1.0).abs() < 1e-10);
        let trace: f64 = ["rho_00", "rho_11", "rho_22", "rho_33"].iter().map(|c| cell(r, &header, c)).sum();
        let n: i32 = r[0].parse().unwrap();
        assert!((trace - (-1.0f64 / 3.0).powi(n)).abs() < 1e-10);
    }
}
