//! The `fatpoints` binary end to end.

use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fatpoints"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn prove_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let o = run(&["prove", "3", "5", "14", "-o", path(&cert)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("by DEG1"), "{}", stdout(&o));

    let o = run(&["verify", path(&cert)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "Accept");

    let o = run(&["explain", path(&cert)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("exceptional component"));
}

#[test]
fn tampered_certificate_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    assert!(run(&["prove", "3", "5", "14", "-o", path(&cert)]).status.success());
    let mut json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    let v = json["claim"]["value"].as_i64().unwrap();
    json["claim"]["value"] = (v + 1).into();
    std::fs::write(&cert, json.to_string()).unwrap();

    let o = run(&["verify", path(&cert)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("Reject at /"), "{}", stdout(&o));
}

#[test]
fn exceptional_quartic_row() {
    let o = run(&["prove", "4", "3", "7"]);
    assert!(o.status.success());
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(json["rule"], "TABLE");
    assert_eq!(json["claim"]["value"], 0);
    assert_eq!(json["claim"]["system"], "L(r=4,d=3; 2^7)");
}

#[test]
fn dim_and_classify() {
    let o = run(&["dim", "L(r=2,d=4; 2^5)"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("dim       0"), "{text}");
    assert!(text.contains("SPECIAL"));

    let o = run(&["--format", "json", "classify", "3", "4", "8"]);
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(json["expected"], 2);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["dim", "L(r=2,d="]).status.code(), Some(2));
    assert_eq!(run(&["verify", "/nonexistent/cert.json"]).status.code(), Some(2));
    assert_eq!(
        run(&["--max-cols", "50", "dim", "L(r=6,d=6; 2^3)"]).status.code(),
        Some(3)
    );
}

#[test]
fn sweep_csv_is_stable() {
    let a = run(&["--format", "csv", "sweep", "--r-max", "3", "--d-max", "4"]);
    let b = run(&["--format", "csv", "sweep", "--r-max", "3", "--d-max", "4"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("r,d,n,virtual,expected,oracle_dim,special,rule,ms\n"));
    assert!(text.contains("2,4,5,-1,-1,0,true,TABLE,"), "{text}");
}
