//! End-to-end tests of the command-line interface: row contracts, exit
//! codes, skip semantics, and byte-level determinism.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pho"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn sequences_row_contract() {
    let out = run(&["sequences", "--n-max", "2", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5, "header + 3 rows + footer:\n{text}");
    assert_eq!(lines[0], "n,omega,chi,epsilon,tau,chi_residual");
    assert!(lines[1].starts_with("0,1.7724538509,"), "{}", lines[1]);
    assert!(lines[4].contains("0.4277279327"), "footer: {}", lines[4]);
}

#[test]
fn sequences_golden_snapshot() {
    // frozen wire format: the cells derive from gamma/zeta evaluations only
    let out = run(&["sequences", "--n-max", "2", "--format", "csv"]);
    let want = "\
n,omega,chi,epsilon,tau,chi_residual
0,1.7724538509,0.7724538509,0.5191397136,0.4431134627,0.3447259182
1,2.2155673136,0.6382170444,0.3355961077,0.4431134627,0.2104891117
2,2.6586807764,0.6341169117,0.3087167689,0.3323350970,0.2063889790
-Z0(1/2),0.4277279327,,,,
";
    assert_eq!(stdout(&out), want);
}

#[test]
fn verify_nonnegative_gaussian_all_pass() {
    let out = run(&[
        "verify",
        "--potential",
        "gauss(a=1,s=1)",
        "--n-max",
        "10",
    ]);
    assert!(out.status.success(), "exit: {:?}", out.status);
    let text = stdout(&out);
    assert_eq!(
        text.lines().next().unwrap(),
        "theorem,n,s,lhs,rhs,slack,verdict,note"
    );
    let mut saw = std::collections::HashMap::new();
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        let verdict = fields[6];
        assert_ne!(verdict, "fail", "failing row: {line}");
        *saw.entry((fields[0].to_string(), verdict.to_string())).or_insert(0) += 1;
    }
    // every sum bound and both nonnegative power bounds ran; the zero-mean
    // bound is skipped with its hypothesis named
    for thm in ["thm31", "thm41", "thm51", "cor53"] {
        assert_eq!(saw[&(thm.to_string(), "pass".to_string())], 11);
    }
    for thm in ["power1", "power1a"] {
        assert_eq!(saw[&(thm.to_string(), "pass".to_string())], 33);
    }
    assert_eq!(saw[&("powerzeromean".to_string(), "skipped".to_string())], 33);
    // q >= 0 means the offset constant vanishes and both regularized bounds
    // coincide exactly, field for field
    let rows31: Vec<&str> = text.lines().filter(|l| l.starts_with("thm31,")).collect();
    let rows41: Vec<&str> = text.lines().filter(|l| l.starts_with("thm41,")).collect();
    for (a, b) in rows31.iter().zip(rows41.iter()) {
        assert_eq!(a[6..], b[6..], "{a} vs {b}");
    }
}

#[test]
fn verify_zero_mean_preset_skips_and_passes() {
    let out = run(&[
        "verify",
        "--potential",
        "meanzero(a=0.3)",
        "--n-max",
        "10",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        match fields[0] {
            "thm31" | "power1" | "power1a" => {
                assert_eq!(fields[6], "skipped", "{line}");
                assert!(!fields[7].is_empty(), "skip reason missing: {line}");
            }
            _ => assert_eq!(fields[6], "pass", "{line}"),
        }
    }
}

#[test]
fn verify_rejects_invalid_parameters() {
    let out = run(&["verify", "--potential", "box(k=-1,d=0.1)"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    assert!(err.contains("box"), "stderr: {err}");
}

#[test]
fn unknown_flags_are_rejected_with_usage() {
    let out = run(&["verify", "--wrench", "5"]);
    assert_ne!(out.status.code(), Some(0));
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    assert!(err.to_lowercase().contains("usage"), "stderr: {err}");
}

#[test]
fn identical_configs_produce_identical_bytes() {
    for args in [
        vec!["sequences", "--n-max", "40", "--format", "json"],
        vec!["verify", "--potential", "box(k=1,d=0.4)", "--n-max", "4"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "nondeterministic output for {args:?}");
    }
}

#[test]
fn out_flag_writes_the_same_report() {
    let dir = std::env::temp_dir().join("pho-cli-test-out");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("seq.csv");
    let piped = run(&["sequences", "--n-max", "5"]);
    let filed = run(&[
        "sequences",
        "--n-max",
        "5",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(filed.status.success());
    assert!(filed.stdout.is_empty());
    let written = std::fs::read(&path).unwrap();
    assert_eq!(written, piped.stdout);
}

#[test]
fn counterexample_reports_selected_spike() {
    let out = run(&["counterexample", "--n", "0", "--N", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    // amplitude is twice the minimal choice 4 pi
    let k: f64 = row[2].parse().unwrap();
    assert!((k - 8.0 * std::f64::consts::PI).abs() < 1e-8, "k = {k}");
    let lhs: f64 = row[4].parse().unwrap();
    assert!(lhs <= -1.0);
    assert_eq!(row[7], "pass");
}

#[test]
fn hermite_check_is_clean() {
    let out = run(&["hermite-check"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut rows = 0;
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[3], "pass", "{line}");
        let residual: f64 = fields[1].parse().unwrap();
        assert!(residual < 1e-8, "{line}");
        rows += 1;
    }
    assert!(rows >= 7, "expected the full check suite, got {rows} rows");
}

#[test]
fn trace_tail_approaches_target_from_below() {
    let out = run(&[
        "trace",
        "--potential",
        "box(k=1,d=0.5)",
        "--n-max",
        "40",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = report["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 41);
    let gap = |n: usize| rows[n]["gap_to_target"].as_f64().unwrap();
    // tail sits below the target, and the gap magnitude shrinks along each
    // parity subsequence (the bound sequences advance in parity pairs)
    for n in 10..=40 {
        assert!(gap(n) < 0.0, "gap not below target at n={n}");
    }
    for n in 26..=38 {
        assert!(
            gap(n + 2).abs() < gap(n).abs(),
            "parity-tail gap grew at n={n}"
        );
    }
    // internal consistency: rhs_chi equals the tabulated chi times the
    // (unit) integral over pi
    let seq = run(&["sequences", "--n-max", "40", "--format", "json"]);
    let seq_report: serde_json::Value = serde_json::from_slice(&seq.stdout).unwrap();
    let chis = seq_report["rows"].as_array().unwrap();
    for n in [0usize, 17, 40] {
        let chi = chis[n]["chi"].as_f64().unwrap();
        let rhs_chi = rows[n]["rhs_chi"].as_f64().unwrap();
        assert!(
            (rhs_chi - chi / std::f64::consts::PI).abs() < 1e-12,
            "rhs_chi mismatch at n={n}"
        );
    }
}

#[test]
fn trace_rejects_indefinite_presets() {
    let out = run(&["trace", "--potential", "meanzero(a=1)"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn trace_degenerate_zero_perturbation() {
    let out = run(&["trace", "--potential", "gauss(a=0,s=1)", "--n-max", "3"]);
    assert!(out.status.success());
    for line in stdout(&out).lines().skip(1) {
        for cell in line.split(',').skip(1) {
            let v: f64 = cell.parse().unwrap();
            assert_eq!(v, 0.0, "nonzero column in {line}");
        }
    }
}
