use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn selfsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_selfsim"))
        .args(args)
        .arg("--quiet")
        .output()
        .expect("spawn selfsim")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const EQUAL: &str = "[problem]\nalpha = 2\nbeta = 2\nd1 = 1\nd2 = 1\nA_minus = 1\nA_plus = 2\n[grid]\nn = 401\n[profile]\ntol = 1e-10\n[time]\ntau_end = 1\n";
const GAP: &str = "[problem]\nalpha = 2\nbeta = 1\nd1 = 1\nd2 = 2\nA_minus = 1\nA_plus = 1.1\n[grid]\nn = 401\n[time]\ntau_end = 1.5\n";
const LARGE_THETA: &str = "[problem]\nalpha = 2\nbeta = 1\nd1 = 1\nd2 = 5\nA_minus = 0.2\nA_plus = 3\n[grid]\nn = 401\n[time]\ntau_end = 0.2\n";

const HEADER: &str = "tau,E_B,I_Fisher,D_react,I_Lambda,I_Lambda_1,I_Lambda_2,hellinger_sq,D_B_total,dissipation_residual\n";

fn synthetic_csv(rate: f64) -> String {
    let mut s = HEADER.to_string();
    for i in 0..=40 {
        let t = i as f64 * 0.1;
        s += &format!("{t},{},0,0,0,0,0,0,0,0\n", (-rate * t).exp());
    }
    s
}

const CERT: &str = r#"{"eta": 1.0, "mu": 0.0, "K": 0.0, "gamma": 1.0, "p": 1.0, "regime_tag": "synthetic"}"#;

#[test]
fn profile_equal_exponents_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", EQUAL);
    let o = selfsim(&["profile", "--config", s(&cfg), "--out", s(dir.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    assert!(r["max_error_vs_closed_form"].as_f64().unwrap() < 1e-6);
    let csv = std::fs::read_to_string(dir.path().join("profile.csv")).unwrap();
    assert!(csv.starts_with("y,U,V,Lambda"));
    assert_eq!(csv.lines().count(), 402);
}

#[test]
fn profile_flat_data_and_impossible_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let flat = write_config(dir.path(), "flat.toml", &EQUAL.replace("A_plus = 2", "A_plus = 1"));
    let o = selfsim(&["profile", "--config", s(&flat), "--out", s(dir.path())]);
    assert_eq!(code(&o), 0);
    let tight = EQUAL.replace("tol = 1e-10", "tol = 1e-30\nmax_iter = 5").replace("beta = 2", "beta = 1");
    let tight = write_config(dir.path(), "tight.toml", &tight);
    let o = selfsim(&["profile", "--config", s(&tight), "--out", s(dir.path())]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("did not converge"));
}

#[test]
fn simulate_gap_case_passes_and_reverifies() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "gap.toml", GAP);
    let o = selfsim(&["simulate", "--config", s(&cfg), "--out", s(dir.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["diagnostics.csv", "summary.json", "manifest.json"] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }
    let summary: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["pass"], Value::Bool(true));
    let cert = summary["checks"][0]["certificate"].clone();
    assert!(cert.is_object());
    let cert_path = write_config(dir.path(), "cert.json", &cert.to_string());
    let d = dir.path().join("diagnostics.csv");
    let o = selfsim(&["verify", "--diagnostics", s(&d), "--certificate", s(&cert_path)]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["pass"], Value::Bool(true));
}

#[test]
fn simulate_without_certificate_still_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "big.toml", LARGE_THETA);
    let o = selfsim(&["simulate", "--config", s(&cfg), "--out", s(dir.path())]);
    assert_eq!(code(&o), 0);
    let summary = std::fs::read_to_string(dir.path().join("summary.json")).unwrap();
    assert!(summary.contains("ThetaTooLarge"), "{summary}");
}

#[test]
fn simulate_zero_horizon_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "z.toml", &GAP.replace("tau_end = 1.5", "tau_end = 0"));
    let o = selfsim(&["simulate", "--config", s(&cfg), "--out", s(dir.path())]);
    assert!(matches!(code(&o), 0 | 1), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("diagnostics.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1);
    assert!(csv.starts_with("tau,E_B,"));
}

#[test]
fn verify_synthetic_curves() {
    let dir = tempfile::tempdir().unwrap();
    let cert = write_config(dir.path(), "cert.json", CERT);
    let good = write_config(dir.path(), "good.csv", &synthetic_csv(2.0));
    let bad = write_config(dir.path(), "bad.csv", &synthetic_csv(-0.5));
    let o = selfsim(&["verify", "--diagnostics", s(&good), "--certificate", s(&cert), "--out", s(dir.path())]);
    assert_eq!(code(&o), 0);
    assert!(dir.path().join("verdict.json").is_file());
    let o = selfsim(&["verify", "--diagnostics", s(&bad), "--certificate", s(&cert)]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    assert_eq!(v["pass"], Value::Bool(false));
    assert!(v["violations"].as_u64().unwrap() > 0);
    let o = selfsim(&["verify", "--diagnostics", s(&dir.path().join("missing.csv")), "--certificate", s(&cert)]);
    assert_eq!(code(&o), 3);
}

#[test]
fn constants_reports() {
    let dir = tempfile::tempdir().unwrap();
    let flat = write_config(dir.path(), "flat.toml", &GAP.replace("A_plus = 1.1", "A_plus = 1"));
    let o = selfsim(&["constants", "--config", s(&flat)]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["lambda_star"].as_f64(), Some(0.0));
    assert_eq!(r["theta"].as_f64(), Some(0.0));
    let gap = write_config(dir.path(), "gap.toml", GAP);
    let r = json(&selfsim(&["constants", "--config", s(&gap)]));
    assert!(r["theta"].as_f64().unwrap() < 0.5);
    let o = selfsim(&["constants", "--config", s(&gap), "--p", "3"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn conjugate_tables() {
    let dir = tempfile::tempdir().unwrap();
    let o = selfsim(&["conjugate", "--alpha", "1,2", "--points", "11", "--out", s(dir.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let t = std::fs::read_to_string(dir.path().join("conjugate.csv")).unwrap();
    assert_eq!(t.lines().count(), 1 + 22);
    let m = std::fs::read_to_string(dir.path().join("m_hat.csv")).unwrap();
    assert!(m.starts_with("p,alpha,m_hat\n"));
    assert_eq!(code(&selfsim(&["conjugate", "--points", "1"])), 3);
}

#[test]
fn sweep_rows_and_theta_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "big.toml", LARGE_THETA);
    let o = selfsim(&["sweep", "--config", s(&cfg), "--param", "problem.A_plus", "--values", "0.5,1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["rows"].as_array().unwrap().len(), 2);
    let o = selfsim(&["sweep", "--config", s(&cfg), "--param", "problem.A_plus", "--range", "1:2:0"]);
    assert_eq!(code(&o), 0);
    assert!(json(&o)["rows"].as_array().unwrap().is_empty());
    let o = selfsim(&["sweep", "--config", s(&cfg), "--param", "problem.A_plus", "--range", "0.3:3:4", "--threads", "2"]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    let thetas: Vec<f64> = r["rows"].as_array().unwrap().iter().map(|row| row["theta"].as_f64().unwrap()).collect();
    assert!(thetas.windows(2).all(|w| w[0] <= w[1]), "{thetas:?}");
    let first = r["first_theta_too_large"].as_f64().unwrap();
    let idx = r["rows"].as_array().unwrap().iter().position(|row| row["value"].as_f64() == Some(first)).unwrap();
    assert!(thetas[idx] >= 0.5 && (idx == 0 || thetas[idx - 1] < 0.5));
    let o = selfsim(&["sweep", "--config", s(&cfg), "--param", "problem.nope", "--values", "1"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&selfsim(&["profile"])), 3);
    assert_eq!(code(&selfsim(&["bogus"])), 3);
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.toml", &format!("{GAP}colour = 3\n"));
    let o = selfsim(&["simulate", "--config", s(&cfg), "--out", s(dir.path())]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));
}
