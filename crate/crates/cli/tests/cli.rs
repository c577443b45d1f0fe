use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn example(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/examples").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_novikov")).args(args).output().unwrap()
}

fn run_json(cmd: &str, file: &str, extra: &[&str]) -> (i32, Value) {
    let path = example(file);
    let mut args = vec![cmd, path.to_str().unwrap(), "--json"];
    args.extend_from_slice(extra);
    let out = run(&args);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)));
    (out.status.code().unwrap(), v)
}

#[test]
fn shift_has_trivial_witt_part() {
    let (code, v) = run_json("decompose-novikov", "rationals-shift.json", &[]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["b2"]["terms"], serde_json::json!([[0, "1"]]));
    assert_eq!(v["results"]["b3"]["idempotent"], serde_json::json!([["1"]]));
    assert_eq!(v["results"]["b3"]["nu"], serde_json::json!([["0"]]));
    assert_eq!(v["status"], "pass");
}

#[test]
fn matrix_ring_witness() {
    let (code, v) = run_json("witt-witness", "matrix-ring.json", &[]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["witness"]["obstruction"], serde_json::json!([["-1", "0"], ["0", "1"]]));
    assert_eq!(v["results"]["witness"]["factorization"].as_array().unwrap().len(), 18);
}

#[test]
fn product_roundtrip_passes_oracle() {
    let (code, v) = run_json("verify-roundtrip", "rationals-product.json", &["--verify"]);
    assert_eq!(code, 0, "{v:#}");
    assert_eq!(v["results"]["oracle"], true);
    let checks = v["checks"].as_array().unwrap();
    for name in ["oracle.det_factorization", "oracle.witt_part", "additivity.b2", "k_independence.b2"] {
        let c = checks.iter().find(|c| c["name"] == name).unwrap();
        assert_eq!(c["status"], "pass", "{name}");
    }
}

#[test]
fn exit_codes() {
    let (code, v) = run_json("triangularize", "rationals-shift.json", &[]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "capability");

    let (code, v) = run_json("witt-witness", "rationals-shift.json", &[]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "no-witness");

    let (code, v) = run_json("decompose-novikov", "rationals-shift.json", &["--precision", "3"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "precision");

    let out = run(&["no-such-command", "x.json"]);
    assert_eq!(out.status.code(), Some(2));

    let dir = std::env::temp_dir().join(format!("novikov-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad-inverse.json");
    std::fs::write(
        &bad,
        r#"{"ring": {"kind": "rationals"}, "precision": 6, "flavor": "novikov",
            "matrix": [[{"terms": [[1, "1"]]}]], "inverse": [[{"terms": [[-1, "2"]]}]]}"#,
    )
    .unwrap();
    let out = run(&["validate", bad.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["checks"][0]["status"], "fail");
    assert!(!v["checks"][0]["witness"].as_str().unwrap().is_empty());
}

#[test]
fn reports_are_byte_identical() {
    for (cmd, file) in [
        ("verify-roundtrip", "rationals-product.json"),
        ("decompose-novikov", "group-ring.json"),
        ("witt-witness", "matrix-ring.json"),
    ] {
        let path = example(file);
        let args = [cmd, path.to_str().unwrap(), "--json", "--seed", "7", "--verify"];
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.stdout, b.stdout, "{cmd} {file}");
        assert!(!a.stdout.is_empty());
    }
}

#[test]
fn summary_mode_prints_checks() {
    let path = example("mod101-series.json");
    let out = run(&["triangularize", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("certificate.replay"));
    assert!(text.contains("PASS"));
}
