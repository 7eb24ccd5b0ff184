//! Byte-for-byte pins on generated output. Set `UPDATE_GOLDEN=1` to rewrite.

use std::path::PathBuf;

use nucheck_core::corpus::load_case_study;
use nucheck_core::driver::{run_2dbmc, BmcConfig, Engine};
use nucheck_core::encoder::{encode, EncodeOptions};
use sha2::{Digest, Sha256};

fn golden(name: &str, actual: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected =
        std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(
        actual, expected,
        "{name} changed; rerun with UPDATE_GOLDEN=1 if intended"
    );
}

#[test]
fn parking_psi1_script_hash() {
    let aps = load_case_study("aps").unwrap();
    let psi1 = &aps.property("psi1").unwrap().formula;
    let script = encode(&aps.net, psi1, 5, 3, EncodeOptions::default())
        .unwrap()
        .to_smt2();
    let digest: String = Sha256::digest(script.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect();
    golden("aps_psi1_l5_k3.sha256", &format!("{digest}\n"));
}

#[test]
fn oracle_report_json() {
    let aps = load_case_study("aps").unwrap();
    let psi2 = &aps.property("psi2").unwrap().formula;
    let cfg = BmcConfig {
        lambdas: 1..=3,
        engine: Engine::oracle(),
        ..BmcConfig::default()
    };
    let report = run_2dbmc(&aps.net, psi2, &cfg).unwrap().without_timings();
    golden(
        "aps_psi2_oracle_report.json",
        &format!("{}\n", report.to_json()),
    );
}
