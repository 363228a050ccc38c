//! Black-box tests of the CLI: exit-code contract, output determinism and
//! the documented flag surface.

use std::process::{Command, Output};

fn fcb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fcb"))
        .args(args)
        .env("FCB_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn compute_p2_anchored_value() {
    // ε_1(W^2, p=2) = √(ζ(4)/π); with r=2, n=1 the closed form is anchored
    // by π^{3/2}/√90
    let out = fcb(&["compute", "--r", "2", "--n", "1", "--p", "2", "--metric", "uniform"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let line = text.lines().find(|l| l.starts_with("eps_n")).unwrap();
    let value: f64 = line.split('=').nth(1).unwrap().trim().parse().unwrap();
    let expect = std::f64::consts::PI.powf(1.5) / 90f64.sqrt();
    assert!((value - expect).abs() < 1e-10, "{value} vs {expect}");
}

#[test]
fn compute_high_smoothness_bracket() {
    // n^r·ε within 3(1+1/n)^{-r} of 4/π at r=40, n=4, p=∞
    let out = fcb(&["compute", "--r", "40", "--n", "4", "--p", "inf", "--metric", "uniform"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let line = text.lines().find(|l| l.starts_with("n^r * eps_n")).unwrap();
    let scaled: f64 = line.split('=').nth(1).unwrap().trim().parse().unwrap();
    let bound = 3.0 * 1.25f64.powf(-40.0);
    assert!(
        (scaled - 4.0 / std::f64::consts::PI).abs() <= bound,
        "{scaled} not within {bound:.3e} of 4/π"
    );
}

#[test]
fn compute_out_of_scope_exits_2() {
    let out = fcb(&["compute", "--r", "0.5", "--n", "1", "--p", "inf", "--metric", "uniform"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compute_unreachable_tolerance_exits_3() {
    let out = fcb(&[
        "compute", "--r", "2.5", "--n", "2", "--p", "inf", "--metric", "uniform", "--tol", "1e-30",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn compute_json_output_parses() {
    let out = fcb(&[
        "compute", "--r", "3", "--n", "2", "--p", "2", "--metric", "uniform", "--out", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert!(v["value"].as_f64().unwrap() > 0.0);
    assert!(v["implied_o1"].as_f64().is_some());
}

#[test]
fn verify_selected_suite_passes() {
    let out = fcb(&["verify", "--suite", "tailchain"]);
    assert_eq!(out.status.code(), Some(0), "stdout: {}", stdout(&out));
    assert!(stdout(&out).contains("PASS [tailchain]"));
}

#[test]
fn verify_regime_suite_passes() {
    let out = fcb(&["verify", "--suite", "regime"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_injected_tolerance_exits_3() {
    let out = fcb(&["verify", "--suite", "special", "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(3), "stdout: {}", stdout(&out));
}

#[test]
fn verify_unknown_suite_exits_2() {
    let out = fcb(&["verify", "--suite", "nonexistent-suite"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_deterministic_and_bracketed() {
    let args = [
        "sweep", "--n", "1..3", "--r-rule", "10(n+1)", "--p", "inf", "--metric", "uniform",
    ];
    let a = fcb(&args);
    assert_eq!(a.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&a.stderr));
    let b = fcb(&args);
    assert_eq!(stdout(&a), stdout(&b), "sweep output not byte-identical");

    let text = stdout(&a);
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("setting,n,r,p,q,exact,leading"));
    let mut rows = 0;
    for line in lines {
        if line.starts_with('#') {
            continue;
        }
        rows += 1;
        // every row satisfies the bracket with a generous constant
        let cols: Vec<&str> = line.split(',').collect();
        let o1: f64 = cols[8].parse().unwrap();
        assert!(o1.abs() < 10.0, "row O1 out of band: {line}");
    }
    assert_eq!(rows, 3);
    assert!(text.contains("# max_abs_implied_O1"));
}

#[test]
fn sweep_empty_range_exits_2() {
    let out = fcb(&[
        "sweep", "--n", "5..2", "--r-rule", "2(n+1)", "--p", "2", "--metric", "uniform",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_explicit_r_values_and_json() {
    let out = fcb(&[
        "sweep", "--n", "2", "--r-values", "4,6", "--p", "2", "--metric", "uniform", "--out",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["diagnostics"].as_array().unwrap().len(), 2);
}

#[test]
fn psi_file_input() {
    let dir = std::env::temp_dir().join("fcb-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("psi.json");
    std::fs::write(
        &path,
        r#"{"explicit":[1.0,0.5],"tail":{"coeff":0.5,"ratio":0.5}}"#,
    )
    .unwrap();
    let out = fcb(&[
        "compute", "--psi", &format!("file:{}", path.display()), "--n", "1", "--p", "2",
        "--metric", "uniform",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    // ψ(k) = 0.5·0.5^k beyond the head, so
    // Σψ² = 1 + 0.25 + 0.25·Σ_{k≥3} 0.25^k = 1.25 + 0.25·0.25³/(1−0.25)
    let expect =
        ((1.0 + 0.25 + 0.25 * 0.25f64.powi(3) / 0.75) / std::f64::consts::PI).sqrt();
    let text = stdout(&out);
    let line = text.lines().find(|l| l.starts_with("eps_n")).unwrap();
    let value: f64 = line.split('=').nth(1).unwrap().trim().parse().unwrap();
    assert!((value - expect).abs() < 1e-12, "{value} vs {expect}");
}

#[test]
fn beta_seq_file_round_trip() {
    let dir = std::env::temp_dir().join("fcb-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("beta.json");
    std::fs::write(&path, r#"{"explicit":[0.5,1.5],"default":0.0}"#).unwrap();
    let out = fcb(&[
        "compute", "--r", "4", "--n", "1", "--p", "2", "--metric", "uniform", "--beta-seq",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    // L2 value is phase-free: must match the stationary default
    let plain = fcb(&["compute", "--r", "4", "--n", "1", "--p", "2", "--metric", "uniform"]);
    let get = |o: &Output| -> f64 {
        stdout(o)
            .lines()
            .find(|l| l.starts_with("eps_n"))
            .unwrap()
            .split('=')
            .nth(1)
            .unwrap()
            .trim()
            .parse()
            .unwrap()
    };
    assert!((get(&out) - get(&plain)).abs() < 1e-12);
}
