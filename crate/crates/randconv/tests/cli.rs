//! Exit-code and schema contracts of the randconv binary.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_randconv"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn rate_success_and_schema() {
    let out = run(&[
        "rate", "--source", "0.8,0.2", "--target", "0.6,0.4", "--nu", "0.9",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("a,r2,regime,threshold,residual"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[2], "ratio-less");
    let residual: f64 = row[4].parse().unwrap();
    assert!(residual <= 1e-8);
}

#[test]
fn rate_missing_nu_is_usage_error() {
    let out = run(&["rate", "--source", "0.8,0.2", "--target", "0.6,0.4"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("--nu"));
}

#[test]
fn rate_both_uniform_is_regime_error() {
    let out = run(&[
        "rate", "--source", "0.5,0.5", "--target", "0.25,0.25,0.25,0.25", "--nu", "0.5",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rate_io_error() {
    let out = run(&[
        "rate",
        "--source",
        "0.8,0.2",
        "--target",
        "0.6,0.4",
        "--nu",
        "0.9",
        "--out",
        "/nonexistent-dir/why/out.csv",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn curve_schema_and_equal_ratio_plateau() {
    let out = run(&[
        "curve", "--source", "0.8,0.2", "--target", "0.8,0.2", "--b-grid", "-2:0:0.5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("b,fidelity,regime"));
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[2], "ratio-equal");
        let f: f64 = cols[1].parse().unwrap();
        assert_eq!(f, 1.0);
    }
}

#[test]
fn curve_attainment_table() {
    let out = run(&[
        "curve",
        "--source",
        "0.6,0.4",
        "--target",
        "0.8,0.2",
        "--b-grid",
        "0.5:0.5:1",
        "--attainment",
        "-3:3:0.5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,g_p,g_pqb,a"));
    for line in lines {
        let cols: Vec<f64> = line.split(',').map(|t| t.parse().unwrap()).collect();
        // the attainment curve dominates the source CDF in this regime
        assert!(cols[3] >= cols[1] - 1e-9);
    }
}

#[test]
fn finite_n_schema_and_file_output() {
    let dir = std::env::temp_dir().join("randconv-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("rows.csv");
    let out = run(&[
        "finite-n",
        "--source",
        "0.8,0.2",
        "--target",
        "0.6,0.4",
        "--nu",
        "0.9",
        "--n-grid",
        "8,16",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("n,L,fm,limit,gap\n"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn source_from_file() {
    let dir = std::env::temp_dir().join("randconv-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("dist.txt");
    std::fs::write(&path, "0.8\n0.2\n").unwrap();
    let out = run(&[
        "rate",
        "--source",
        path.to_str().unwrap(),
        "--target",
        "0.6,0.4",
        "--nu",
        "0.9",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn oneshot_reports_gap_and_map() {
    let out = run(&["oneshot", "--source", "0.7,0.3", "--target", "0.6,0.4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("f_det = "));
    assert!(text.contains("f_major = "));
    assert!(text.contains("gap = "));
    assert!(text.contains("det_map = 0,1"));
    assert!(text.contains("optimizer_blocks"));
}

#[test]
fn validate_passes_and_fault_injection_fails() {
    let out = run(&["validate"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "oracle-equivalence",
        "dominance",
        "quadrature-identity",
        "inverse-consistency",
    ] {
        assert!(text.contains(name), "missing suite {name} in {text}");
    }
    assert!(text.contains("overall: pass"));

    let out = run(&["validate", "--fault-inject"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("invariant failed: oracle-equivalence"));
}
