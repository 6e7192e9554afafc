//! End-to-end command-line tests: construct/close/analyze round trips, exit
//! codes, cache behaviour and classification output.

use std::path::Path;
use std::process::Command;

fn projmon() -> Command {
    Command::new(env!("CARGO_BIN_EXE_projmon"))
}

fn run_in(dir: &Path, args: &[&str]) -> (i32, String, String) {
    let out = projmon()
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn construct_close_analyze_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let (code, stdout, _) = run_in(
        dir,
        &["construct", "--family", "A", "--n", "3", "--field", "Q", "--out", "a3.json"],
    );
    assert_eq!(code, 0);
    assert!(stdout.contains("12 generators"));

    let (code, stdout, _) = run_in(dir, &["close", "--in", "a3.json", "--no-cache"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("finite(230)"), "{stdout}");

    let (code, stdout, _) = run_in(
        dir,
        &[
            "analyze",
            "--in",
            "a3.json",
            "--no-cache",
            "--report",
            "kernels,images,complete,irreducible,star,split",
            "--json",
        ],
    );
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(stdout.trim()).unwrap();
    assert_eq!(v["size"], 230);
    assert_eq!(v["kernels"].as_array().unwrap().len(), 6);
    assert_eq!(v["images"].as_array().unwrap().len(), 4);
    assert_eq!(v["complete"], true);
    assert_eq!(v["irreducible"], true);
    assert_eq!(v["star"], true);
    assert_eq!(v["split"], false);
}

#[test]
fn cache_hits_match_cold_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    run_in(
        dir,
        &["construct", "--family", "B", "--n", "2", "--t", "2", "--field", "Q", "--out", "b.json"],
    );
    let (code1, cold, _) = run_in(
        dir,
        &["close", "--in", "b.json", "--cache", "cachedir", "--json"],
    );
    let (code2, warm, _) = run_in(
        dir,
        &["close", "--in", "b.json", "--cache", "cachedir", "--json"],
    );
    assert_eq!(code1, 0);
    assert_eq!(code2, 0);
    assert_eq!(cold, warm);
    assert!(dir.join("cachedir").read_dir().unwrap().next().is_some());
}

#[test]
fn cap_exceeded_exit_code() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    run_in(
        dir,
        &["construct", "--family", "A", "--n", "3", "--field", "Q", "--out", "a3.json"],
    );
    let (code, stdout, _) = run_in(
        dir,
        &["close", "--in", "a3.json", "--no-cache", "--cap", "10"],
    );
    assert_eq!(code, 3, "{stdout}");
    assert!(stdout.contains("cap-exceeded"));
}

#[test]
fn usage_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    // Unknown flags are a clap usage error.
    let (code, _, _) = run_in(dir, &["close", "--bogus"]);
    assert_eq!(code, 2);
    // Fourth roots of unity are not available over the rationals.
    let (code, _, stderr) = run_in(
        dir,
        &["construct", "--family", "B", "--n", "2", "--t", "4", "--field", "Q", "--out", "x.json"],
    );
    assert_eq!(code, 2, "{stderr}");
    assert!(stderr.contains("C4"), "{stderr}");
}

#[test]
fn classify_dim2_from_file() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    run_in(
        dir,
        &["construct", "--family", "B", "--n", "2", "--t", "2", "--field", "Q", "--out", "b.json"],
    );
    let (code, stdout, _) = run_in(dir, &["classify", "--in", "b.json", "--no-cache"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(stdout.trim()).unwrap();
    assert_eq!(v["family"].as_str().unwrap(), "X({-1, 1}, 2)");
    assert_eq!(v["via_dual"], false);
}

#[test]
fn normalizer_from_file() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    run_in(
        dir,
        &["construct", "--family", "Z", "--i", "5", "--field", "C3", "--out", "z5.json"],
    );
    let (code, stdout, _) = run_in(dir, &["normalizer", "--in", "z5.json", "--no-cache", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(stdout.trim()).unwrap();
    assert_eq!(v["group_order"], 72);
}

#[test]
fn mingen_from_file() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    run_in(
        dir,
        &["construct", "--family", "A", "--n", "2", "--field", "Q", "--out", "a2.json"],
    );
    // Generator order: (0,1), (0,2), (1,0), (1,2), (2,0), (2,1).
    // The directed 3-cycle 0->1, 1->2, 2->0 is a minimal generating set.
    let (code, stdout, _) = run_in(
        dir,
        &["mingen", "--in", "a2.json", "--no-cache", "--subset", "0,3,4"],
    );
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(stdout.trim()).unwrap();
    assert_eq!(v["generates"], true);
    assert_eq!(v["minimal"], true);
    // A reciprocal pair generates nothing near the whole monoid.
    let (_, stdout, _) = run_in(
        dir,
        &["mingen", "--in", "a2.json", "--no-cache", "--subset", "0,2"],
    );
    let v: serde_json::Value = serde_json::from_str(stdout.trim()).unwrap();
    assert_eq!(v["generates"], false);
}

#[test]
fn verify_with_tiny_cap_fails_controlled() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, stdout, stderr) = run_in(tmp.path(), &["verify", "--only", "1", "--cap", "10"]);
    assert_eq!(code, 1, "{stdout}{stderr}");
    assert!(stdout.contains("cap-exceeded"), "{stdout}");
    assert!(!stderr.contains("panicked"), "{stderr}");
}

#[test]
fn close_out_round_trips_element_list() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    run_in(
        dir,
        &["construct", "--family", "A", "--n", "2", "--field", "Q", "--out", "a2.json"],
    );
    let (code, _, _) = run_in(
        dir,
        &["close", "--in", "a2.json", "--no-cache", "--out", "closed.json"],
    );
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(dir.join("closed.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["elements"].as_array().unwrap().len(), 20);
    assert_eq!(v["descriptor"]["dim"], 2);
}

#[test]
fn construct_y_and_verify_subset() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let (code, stdout, _) = run_in(
        dir,
        &["construct", "--family", "Y", "--w", "z", "--field", "C3", "--out", "y.json"],
    );
    assert_eq!(code, 0);
    assert!(stdout.contains("8 generators"));
    let (code, stdout, _) = run_in(dir, &["close", "--in", "y.json", "--no-cache"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("finite(56)"));
    // A selected criterion of the verification suite runs clean.
    let (code, stdout, _) = run_in(dir, &["verify", "--only", "16"]);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("0 failed"));
}
