//! End-to-end driver tests: selection, exit codes, report formats, and
//! determinism of the JSON output.

use std::path::PathBuf;
use std::process::Command;

fn verify_bin() -> PathBuf {
    // target/<profile>/verify next to the test binary
    let mut p = std::env::current_exe().unwrap();
    p.pop();
    if p.ends_with("deps") {
        p.pop();
    }
    p.join("verify")
}

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data")
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(verify_bin())
        .args(args)
        .arg("--data-dir")
        .arg(data_dir())
        .output()
        .expect("spawn verify");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).to_string(),
        String::from_utf8_lossy(&out.stderr).to_string(),
    )
}

#[test]
fn list_contains_registered_ids() {
    let (code, stdout, _) = run(&["--list", "--n", "3"]);
    assert_eq!(code, 0);
    for id in [
        "gamma1.ab",
        "tau.relations",
        "tau.orders.n3",
        "gn.order.n3",
        "gn.center.n3",
        "gn.normalform.n3",
        "chi.values.n3",
        "lambda-eq-delta.n3",
        "delta.ab.n3",
        "gamma.ab.n3",
        "cusp.classes.n3",
        "eq21.n3",
        "commutator.normalgen",
        "chern.n3",
        "dm.index72",
        "dm.euler",
    ] {
        assert!(stdout.lines().any(|l| l == id), "missing claim id {id}");
    }
}

#[test]
fn unknown_claim_id_is_rejected() {
    let (code, _, stderr) = run(&["--claim", "no.such.claim"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("unknown claim id"));
}

#[test]
fn single_claim_json_witness() {
    let (code, stdout, _) = run(&["--claim", "chern.n3", "--format", "json"]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(doc["schema"], "ballquot-report/1");
    let results = doc["results"].as_array().unwrap();
    assert_eq!(results.len(), 1);
    assert_eq!(results[0]["id"], "chern.n3");
    assert_eq!(results[0]["status"], "pass");
    assert_eq!(results[0]["witness"]["c1sq"], "621");
    assert_eq!(results[0]["witness"]["c2"], "243");
}

#[test]
fn empty_selection_and_deterministic_json() {
    // a cheap slice of claims, run twice; reports must agree up to timing
    let args = &[
        "--claim",
        "gamma1.ab",
        "--claim",
        "chern.n3",
        "--claim",
        "geometry.genus.n3",
        "--format",
        "json",
    ];
    let (c1, out1, _) = run(args);
    let (c2, out2, _) = run(args);
    assert_eq!(c1, 0);
    assert_eq!(c2, 0);
    let strip = |s: &str| -> serde_json::Value {
        let mut v: serde_json::Value = serde_json::from_str(s).unwrap();
        for r in v["results"].as_array_mut().unwrap() {
            r.as_object_mut().unwrap().remove("wall_ms");
        }
        v
    };
    assert_eq!(strip(&out1), strip(&out2));
}

#[test]
fn mutated_data_fails_with_witness() {
    // flip one letter in a relator of the lattice presentation: the
    // representation check must fail and exit 1
    let tmp = std::env::temp_dir().join(format!("ballquot-mutated-{}", std::process::id()));
    std::fs::create_dir_all(&tmp).unwrap();
    for entry in std::fs::read_dir(data_dir()).unwrap() {
        let entry = entry.unwrap();
        std::fs::copy(entry.path(), tmp.join(entry.file_name())).unwrap();
    }
    let gamma = tmp.join("gamma1.pres");
    let text = std::fs::read_to_string(&gamma).unwrap();
    let mutated = text.replace(
        "rel: h3 h2^-1 h1 h4 h2 h1^-1 h3^-1 h4^-1",
        "rel: h3 h2^-1 h1^-1 h4 h2 h1^-1 h3^-1 h4^-1",
    );
    assert_ne!(text, mutated);
    std::fs::write(&gamma, mutated).unwrap();
    let out = Command::new(verify_bin())
        .args(["--claim", "tau.relations", "--format", "json", "--data-dir"])
        .arg(&tmp)
        .output()
        .unwrap();
    let code = out.status.code().unwrap();
    let doc: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&out.stdout)).unwrap();
    std::fs::remove_dir_all(&tmp).ok();
    assert_eq!(code, 1);
    assert_eq!(doc["results"][0]["status"], "fail");
    assert!(doc["results"][0]["witness"].is_object());
}

#[test]
fn missing_data_dir_reports_failure() {
    let out = Command::new(verify_bin())
        .args([
            "--claim",
            "gamma1.ab",
            "--data-dir",
            "/nonexistent-ballquot-data",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code().unwrap(), 1);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("FAIL"));
}
