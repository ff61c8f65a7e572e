//! Replays the checked-in fuzz seeds through the parsers on stable.

use selfsim::runio::{parse_config, read_certificate_json, read_diagnostics_csv, read_profile_table, serialize_config};
use std::path::PathBuf;

fn seeds(target: &str) -> Vec<(PathBuf, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .map(|p| {
            let text = String::from_utf8_lossy(&std::fs::read(&p).unwrap()).into_owned();
            (p, text)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn config_seeds() {
    let mut ok = 0;
    for (path, text) in seeds("parse_config") {
        if let Ok(cfg) = parse_config(&text) {
            assert_eq!(parse_config(&serialize_config(&cfg)).unwrap(), cfg, "{}", path.display());
            ok += 1;
        }
    }
    assert!(ok >= 3);
}

#[test]
fn diagnostics_seeds() {
    let parsed: Vec<bool> = seeds("diagnostics_csv").iter().map(|(_, t)| read_diagnostics_csv(t).is_ok()).collect();
    assert!(parsed.iter().any(|&b| b) && parsed.iter().any(|&b| !b));
}

#[test]
fn certificate_seeds() {
    let parsed: Vec<bool> = seeds("certificate_json").iter().map(|(_, t)| read_certificate_json(t).is_ok()).collect();
    assert_eq!(parsed.iter().filter(|&&b| b).count(), 1);
}

#[test]
fn profile_table_seeds() {
    let parsed: Vec<bool> = seeds("profile_table").iter().map(|(_, t)| read_profile_table(t).is_ok()).collect();
    assert_eq!(parsed.iter().filter(|&&b| b).count(), 2);
}
