//! End-to-end tests of the `acham` binary: exit-code contract, JSON
//! artifacts, determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn acham() -> Command {
    Command::new(env!("CARGO_BIN_EXE_acham"))
}

fn run(args: &[&str]) -> Output {
    acham().args(args).output().expect("binary runs")
}

fn path(dir: &tempfile::TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> String {
    p.to_str().unwrap().to_string()
}

#[test]
fn round_and_verify_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let (input, rounded, report, verdict) = (
        path(&dir, "tri.json"),
        path(&dir, "rounded.json"),
        path(&dir, "report.json"),
        path(&dir, "verify.json"),
    );
    let out = run(&["generate", "--family", "triangle-figure", &s(&input)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = run(&["round", &s(&input), &s(&rounded), "--report", &s(&report)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let rep: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep["format"], "acham-report-v1");
    assert_eq!(rep["bounds_satisfied"], true);
    assert!(rep["max_residual_commutator"].as_f64().unwrap() <= 1e-9);

    let out = run(&["verify", &s(&input), &s(&rounded), "--report", &s(&report), "--out", &s(&verdict)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&verdict).unwrap()).unwrap();
    assert_eq!(v["format"], "acham-verify-v1");
    assert_eq!(v["passed"], true);
    assert_eq!(v["commuting"], true);
}

#[test]
fn round_rejects_out_of_regime_eps() {
    let dir = tempfile::tempdir().unwrap();
    let input = path(&dir, "tri.json");
    run(&["generate", "--family", "triangle-figure", &s(&input)]);
    let out = run(&["round", &s(&input), &s(&path(&dir, "out.json")), "--eps", "2.0"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn round_eps_zero_fixture_is_identity_up_to_formatting() {
    let dir = tempfile::tempdir().unwrap();
    let input = path(&dir, "ising.json");
    let output = path(&dir, "rounded.json");
    run(&["generate", "--family", "tfim-chain", "--n", "5", "--h", "0", &s(&input)]);
    let out = run(&["round", &s(&input), &s(&output)]);
    assert_eq!(out.status.code(), Some(0));
    let a: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&input).unwrap()).unwrap();
    let b: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&output).unwrap()).unwrap();
    assert_eq!(a["n"], b["n"]);
    let (ta, tb) = (a["terms"].as_array().unwrap(), b["terms"].as_array().unwrap());
    assert_eq!(ta.len(), tb.len());
    for (x, y) in ta.iter().zip(tb) {
        assert_eq!(x["qubits"], y["qubits"]);
        let cx = x["coeffs"].as_array().unwrap();
        let cy = y["coeffs"].as_array().unwrap();
        for (rx, ry) in cx.iter().zip(cy) {
            for (vx, vy) in rx.as_array().unwrap().iter().zip(ry.as_array().unwrap()) {
                assert!((vx.as_f64().unwrap() - vy.as_f64().unwrap()).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn generate_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (p1, p2) = (path(&dir, "a.json"), path(&dir, "b.json"));
    let args = ["generate", "--family", "random-near-commuting", "--n", "6", "--m", "8", "--eps-target", "1e-5", "--seed", "11"];
    let (s1, s2) = (s(&p1), s(&p2));
    run(&[&args[..], &[s1.as_str()][..]].concat());
    run(&[&args[..], &[s2.as_str()][..]].concat());
    let b1 = std::fs::read(&p1).unwrap();
    let b2 = std::fs::read(&p2).unwrap();
    assert_eq!(b1, b2);
}

#[test]
fn reduce_collapsing_gap_exits_3_with_ceiling() {
    let dir = tempfile::tempdir().unwrap();
    let input = path(&dir, "tri.json");
    run(&["generate", "--family", "triangle-figure", &s(&input)]);
    let out = run(&[
        "reduce", &s(&input), &s(&path(&dir, "red.json")),
        "--a", "-3", "--b", "-1", "--eps", "1e-12",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("eps <"), "ceiling missing from: {stderr}");
}

#[test]
fn reduce_suceeds_with_wide_gap() {
    let dir = tempfile::tempdir().unwrap();
    let input = path(&dir, "tri.json");
    run(&["generate", "--family", "triangle-figure", &s(&input)]);
    let reduced = path(&dir, "red.json");
    let out = run(&[
        "reduce", &s(&input), &s(&reduced),
        "--a", "-400", "--b", "400", "--eps", "0.02",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&reduced).unwrap()).unwrap();
    let shift = 216.0 * 3.0 * 0.02f64.powf(1.0 / 6.0);
    assert!((doc["a"].as_f64().unwrap() - (-400.0 + shift)).abs() < 1e-9);
    assert!((doc["b"].as_f64().unwrap() - (400.0 - shift)).abs() < 1e-9);
}

#[test]
fn gibbs_certificate_on_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let input = path(&dir, "tri.json");
    run(&["generate", "--family", "triangle-figure", &s(&input)]);
    let cert_path = path(&dir, "cert.json");
    let out = run(&["gibbs", &s(&input), "--beta", "0.5", "--delta", "0.5", "--out", &s(&cert_path)]);
    assert_eq!(out.status.code(), Some(0));
    let cert: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&cert_path).unwrap()).unwrap();
    assert_eq!(cert["format"], "acham-gibbs-v1");
    let measured = cert["measured_trace_distance"].as_f64().unwrap();
    let bound = cert["continuity_bound"].as_f64().unwrap();
    assert!(measured <= bound + 1e-9);
}

#[test]
fn evolve_rounded_passes_and_raw_input_fails() {
    let dir = tempfile::tempdir().unwrap();
    let input = path(&dir, "tri.json");
    let rounded = path(&dir, "rounded.json");
    run(&["generate", "--family", "triangle-figure", &s(&input)]);
    run(&["round", &s(&input), &s(&rounded)]);

    let out = run(&["evolve", &s(&rounded), "--t", "3.7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    // The unrounded triangle does not commute: contract error, exit 1.
    let out = run(&["evolve", &s(&input), "--t", "3.7"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn split_writes_cost_line() {
    let dir = tempfile::tempdir().unwrap();
    let input = path(&dir, "tri.json");
    run(&["generate", "--family", "triangle-figure", &s(&input)]);
    let split = path(&dir, "split.json");
    let out = run(&["split", &s(&input), &s(&split), "--t", "2.5", "--t-block", "64"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&split).unwrap()).unwrap();
    assert_eq!(doc["format"], "acham-split-v1");
    let alpha_b = doc["alpha_b"].as_f64().unwrap();
    let value = doc["cost"]["value"].as_f64().unwrap();
    assert!((value - alpha_b * 2.5 * (64.0 + 3.0)).abs() < 1e-12);
    assert_eq!(doc["delta"]["format"], "acham-v1");
}

#[test]
fn schema_error_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = path(&dir, "bad.json");
    std::fs::write(&bad, "{\"format\": \"nope\"}").unwrap();
    let out = run(&["round", &s(&bad), &s(&path(&dir, "out.json"))]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["round", &s(&path(&dir, "missing.json")), &s(&path(&dir, "out.json"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn norm_violation_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = path(&dir, "big.json");
    std::fs::write(
        &bad,
        r#"{"format":"acham-v1","n":2,"terms":[{"qubits":[0,1],"coeffs":[[0,0,0,0],[0,1.5,0,0],[0,0,0,0],[0,0,0,0]]}]}"#,
    )
    .unwrap();
    let out = run(&["round", &s(&bad), &s(&path(&dir, "out.json"))]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_detects_mismatched_pair() {
    let dir = tempfile::tempdir().unwrap();
    let input = path(&dir, "tri.json");
    run(&["generate", "--family", "triangle-figure", &s(&input)]);
    // The unrounded input against itself: not commuting, exit 1.
    let out = run(&["verify", &s(&input), &s(&input)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn output_precision_override() {
    let dir = tempfile::tempdir().unwrap();
    let input = path(&dir, "tri.json");
    let out = acham()
        .env("ACHAM_OUTPUT_PRECISION", "3")
        .args(["generate", "--family", "triangle-figure", &s(&input)])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&input).unwrap();
    assert!(text.contains("0.005"), "{text}");
    assert!(!text.contains("0.004999"), "precision override ignored: {text}");
}

#[test]
fn no_subcommand_mutates_its_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = path(&dir, "tri.json");
    run(&["generate", "--family", "triangle-figure", &s(&input)]);
    let before = std::fs::read(&input).unwrap();
    run(&["round", &s(&input), &s(&path(&dir, "r.json")), "--report", &s(&path(&dir, "rep.json"))]);
    run(&["gibbs", &s(&input), "--beta", "0.5", "--delta", "0.5"]);
    run(&["split", &s(&input), &s(&path(&dir, "s.json"))]);
    assert_eq!(before, std::fs::read(&input).unwrap());
}

#[test]
fn triangle_paper_fixture_commutes() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = path(&dir, "ref.json");
    run(&["generate", "--family", "triangle-paper", &s(&fixture)]);
    let out = run(&["evolve", &s(&fixture), "--t", "1.0"]);
    assert_eq!(out.status.code(), Some(0));
}
