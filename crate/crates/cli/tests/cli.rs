use std::path::Path;
use std::process::{Command, Output};

fn sschur(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sschur"))
        .args(args)
        .env("THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).unwrap();
    lines
        .map(|l| l.split(',').nth(idx).unwrap().to_string())
        .collect()
}

#[test]
fn multicritical_prints_json_params() {
    let out = sschur(&["multicritical", "--p", "2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), r#"{"t":{"1":0.5},"a":2.0}"#);
}

#[test]
fn limit_shape_csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("shape.csv");
    let out = sschur(&[
        "limit-shape",
        "--p",
        "2",
        "--grid",
        "4",
        "--xmax",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("x,omega,density\n"));
    let omega: f64 = column(&text, "omega")[0].parse().unwrap();
    assert!((omega - 4.0 / std::f64::consts::PI).abs() < 1e-7);
}

#[test]
fn params_file_round_trip_and_rejection() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    std::fs::write(&good, r#"{"t": {"1": 0.4, "3": 0.03}}"#).unwrap();
    let out = sschur(&[
        "weights",
        "--t-file",
        good.to_str().unwrap(),
        "--max-size",
        "20",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("partition,length,size,Q,weight,probability\n"));
    let total: f64 = column(&text, "probability")
        .iter()
        .map(|v| v.parse::<f64>().unwrap())
        .sum();
    assert!(total > 0.99 && total <= 1.0 + 1e-12, "{total}");

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"t": {"1": 2.0, "3": 1.0}}"#).unwrap();
    assert_eq!(
        sschur(&["weights", "--t-file", bad.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    let missing = dir.path().join("missing.json");
    assert_eq!(
        sschur(&["jtable", "--t-file", missing.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn exit_codes() {
    assert_eq!(sschur(&["multicritical"]).status.code(), Some(1));
    assert_eq!(
        sschur(&["multicritical", "--p", "2", "--t-file", "x"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        sschur(&["kernel", "--p", "2", "--points", "a"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        sschur(&["multicritical", "--p", "3"]).status.code(),
        Some(2)
    );
    assert_eq!(
        sschur(&["jtable", "--p", "2", "--tol", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        sschur(&["airy", "--p", "2", "--xmin", "60", "--xmax", "61"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        sschur(&["tw", "--p", "2", "--smin", "-11", "--smax", "0"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn correlation_and_gap_rows() {
    let out = sschur(&["correlation", "--p", "2", "--points", "1,3,5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("points,value,error_bound\n1;3;5,"));
    let out = sschur(&["gap", "--p", "2", "--interval", "2..6", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let g = v[0]["value"].as_f64().unwrap();
    assert!(g > 0.0 && g < 1.0);
    assert_eq!(v[0]["points"], "2;3;4;5;6");
}

#[test]
fn sampling_is_reproducible() {
    let a = sschur(&["sample", "--p", "2", "--count", "50", "--seed", "9"]);
    let b = sschur(&["sample", "--p", "2", "--count", "50", "--seed", "9"]);
    let c = sschur(&["sample", "--p", "2", "--count", "50", "--seed", "10"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(stdout(&a).lines().count(), 51);
}

#[test]
fn grids_are_deterministic_across_thread_counts() {
    let args = [
        "airy", "--p", "4", "--xmin", "-2", "--xmax", "2", "--step", "0.25",
    ];
    let one = Command::new(env!("CARGO_BIN_EXE_sschur"))
        .args(args)
        .env("THREADS", "1")
        .output()
        .unwrap();
    let many = sschur(&args);
    assert!(one.status.success());
    assert_eq!(one.stdout, many.stdout);
    assert!(stdout(&one).starts_with("x,Ai_p,dAi_p\n"));
    let tw = stdout(&sschur(&[
        "tw", "--p", "2", "--smin", "-2", "--smax", "0", "--step", "1",
    ]));
    let f: Vec<f64> = column(&tw, "F_p")
        .iter()
        .map(|v| v.parse().unwrap())
        .collect();
    assert!(f.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn edge_converge_table() {
    let out = sschur(&[
        "edge-converge",
        "--p",
        "2",
        "--target",
        "kernel",
        "--eps",
        "0.25,0.125",
        "--args",
        "-1,0",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("target,p,epsilon,arg1,arg2,finite_value,limit_value,abs_error\n"));
    // three blocks × two ε × four pairs
    assert_eq!(text.lines().count(), 1 + 24);
    let out = sschur(&[
        "edge-converge",
        "--p",
        "2",
        "--target",
        "pfdet",
        "--args",
        "0,1",
    ]);
    assert!(out.status.success());
}

#[test]
fn profile_and_jtable() {
    let out = sschur(&["profile", "--p", "2", "--epsilon", "0.125", "--xmax", "5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let xs = column(&text, "x");
    assert_eq!(xs.len(), 41);
    // far past the scaled edge 2/ε = 16 the profile is flat: ψ(x) = x
    let last: f64 = column(&text, "expected_profile")[40].parse().unwrap();
    assert!((last - 5.0).abs() < 1e-10);
    let out = sschur(&["jtable", "--p", "2", "--mmax", "5"]);
    assert_eq!(stdout(&out).lines().count(), 7);
}

#[test]
fn verify_reports_all_criteria() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("verify.csv");
    let out = sschur(&[
        "verify",
        "--suite",
        "quick",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(Path::new(&path)).unwrap();
    assert_eq!(text.lines().count(), 11);
    assert_eq!(sschur(&["verify", "--strict"]).status.code(), Some(3));
}
