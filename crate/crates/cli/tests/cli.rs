use std::process::{Command, Output};

fn muord(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_muord")).args(args).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = muord(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn predict_lists_each_class() {
    let s = stdout(&["predict", "M11", "--classes"]);
    assert!(s.contains("0^2 ⊕ 1/2^4 ⊕ 1^2"));
    assert_eq!(s.matches("1/4^4 ⊕ 3/4^4").count(), 2);
    assert!(s.contains("predicted ordinary density: 1/4"));
}

#[test]
fn predict_accepts_a_raw_datum() {
    let s = stdout(&["predict", "7:1,2,4"]);
    assert!(s.contains("g = 3"));
}

#[test]
fn lpoly_routes_agree() {
    let args = ["lpoly", "--family", "M11", "--t", "3", "--p", "31"];
    let fast = stdout(&args);
    let naive = stdout(&[&args[..], &["--naive"]].concat());
    let line = |s: &str| s.lines().find(|l| l.starts_with("L(T)")).unwrap().to_owned();
    assert_eq!(line(&fast), line(&naive));
    assert!(fast.contains("functional equation: ok"));
}

#[test]
fn classify_json_at_an_inert_prime() {
    let s = stdout(&["classify", "--family", "M11", "--t", "3", "--p", "7", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&s).unwrap();
    assert_eq!(v["is_mu_ordinary"], true);
    assert_eq!(v["ap"], "-77");
    assert_eq!(v["f"], 4);
}

#[test]
fn bad_prime_is_an_error() {
    let out = muord(&["lpoly", "--family", "M11", "--p", "5"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad prime"));
}

#[test]
fn scan_writes_csv_and_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"family": "M11", "t": 3, "p_min": 3, "p_max": 60, "budget": 12960000}"#).unwrap();
    let csv = dir.path().join("out.csv");
    let cache = dir.path().join("cache.jsonl");
    let s = stdout(&[
        "scan",
        "--config",
        cfg.to_str().unwrap(),
        "--out-csv",
        csv.to_str().unwrap(),
        "--cache",
        cache.to_str().unwrap(),
    ]);
    assert!(!s.is_empty());
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert!(rows.lines().count() > 10);
    assert!(cache.exists());
}

#[test]
fn weyl_check_reports_every_component() {
    let s = stdout(&["weyl-check", "--family", "M11", "--class", "4"]);
    assert_eq!(s.lines().filter(|l| l.starts_with("class 4")).count(), 4);
    assert!(s.lines().filter(|l| l.starts_with("class")).all(|l| l.ends_with("nonconstant")));
}

#[test]
fn assumptions_for_m11() {
    let s = stdout(&["assumptions", "--family", "M11"]);
    assert!(s.contains("Phi = [1, 3]"));
    assert!(s.contains("rank condition: holds"));
}
