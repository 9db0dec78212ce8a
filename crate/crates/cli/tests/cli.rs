use std::path::PathBuf;
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../aodv/scenarios").join(name)
}

fn awn(cwd: &std::path::Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_awn"))
        .current_dir(cwd)
        .args(args)
        .output()
        .expect("binary runs")
}

fn run(args: &[&str]) -> (i32, String, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let mut full: Vec<&str> = args.to_vec();
    let out_s = out.to_str().unwrap().to_string();
    full.extend(["--out", &out_s]);
    let o = awn(dir.path(), &full);
    (o.status.code().unwrap(), String::from_utf8(o.stdout).unwrap(), dir)
}

#[test]
fn toy_trace_shows_the_delivery() {
    let s = scenario("toy1.toml");
    let (code, stdout, dir) = run(&["trace", "--scenario", s.to_str().unwrap()]);
    assert_eq!(code, 0);
    let labels: Vec<&str> = stdout.lines().take(3).map(|l| l.split_whitespace().nth(1).unwrap()).collect();
    assert_eq!(labels, ["a:*cast(mg(d,b))", "tau", "b:deliver(d)"]);
    assert!(stdout.contains("deadlock after 3 steps"));
    assert!(stdout.ends_with("[Y(a) || Y(b)]\n"));
    let file = std::fs::read_to_string(dir.path().join("out/trace.txt")).unwrap();
    assert_eq!(file, stdout);
}

#[test]
fn blocking_mutual_broadcast_deadlocks_at_once() {
    let s = scenario("toy3.toml");
    let (code, stdout, _dir) = run(&["trace", "--scenario", s.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("deadlock after 0 steps\n"), "{stdout}");
}

#[test]
fn same_seed_same_bytes() {
    let s = scenario("fig1.toml");
    let a = run(&["trace", "--scenario", s.to_str().unwrap(), "--seed", "11"]);
    let b = run(&["trace", "--scenario", s.to_str().unwrap(), "--seed", "11"]);
    let fa = std::fs::read(a.2.path().join("out/trace.txt")).unwrap();
    let fb = std::fs::read(b.2.path().join("out/trace.txt")).unwrap();
    assert_eq!(fa, fb);
    assert_eq!(a.1, b.1);
}

#[test]
fn fig1_passes_prop1_and_loop_freedom() {
    let s = scenario("fig1.toml");
    let (code, stdout, dir) = run(&["check", "--scenario", s.to_str().unwrap(), "--checks", "prop1,loopfree"]);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.ends_with("verdict: pass\n"));
    assert!(dir.path().join("out/report.json").exists());
}

#[test]
fn rfc_literal_copy_violates_monotonicity() {
    let s = scenario("rfc_copy.toml");
    let (code, stdout, _dir) = run(&[
        "check",
        "--scenario",
        s.to_str().unwrap(),
        "--checks",
        "monotonic",
        "--format",
        "machine",
    ]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    let w = &v["checks"][0]["witness"];
    assert!(w["message"].as_str().unwrap().contains("fell from 5 to 3"), "{w}");
    assert!(w["trace"].as_array().unwrap().iter().any(|l| l.as_str().unwrap().contains("rerr(")));
}

#[test]
fn state_bound_of_one_is_inconclusive() {
    let s = scenario("fig1.toml");
    let (code, _, _dir) = run(&["check", "--scenario", s.to_str().unwrap(), "--max-states", "1"]);
    assert_eq!(code, 2);
}

#[test]
fn usage_and_parse_errors_exit_3() {
    let (code, _, _d) = run(&["check", "--scenario", "missing.toml"]);
    assert_eq!(code, 3);
    let s = scenario("fig1.toml");
    let (code, _, _d) = run(&["check", "--scenario", s.to_str().unwrap(), "--checks", "nope"]);
    assert_eq!(code, 3);
    let (code, _, _d) = run(&["frobnicate"]);
    assert_eq!(code, 3);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "nodes = 3\n").unwrap();
    let o = awn(dir.path(), &["explore", "--scenario", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn augmentation_is_invisible_on_the_pair() {
    let s = scenario("toy_pair.toml");
    let (code, stdout, _dir) = run(&["bisim", "--scenario", s.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.contains("bisimilar"));
}

#[test]
fn outputs_stay_under_out() {
    let dir = tempfile::tempdir().unwrap();
    let s = scenario("toy_pair.toml");
    for cmd in ["trace", "explore", "check", "bisim"] {
        let o = awn(dir.path(), &[cmd, "--scenario", s.to_str().unwrap(), "--out", "res"]);
        assert!(o.status.success(), "{cmd}");
    }
    let top: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert_eq!(top, ["res"]);
    let mut files: Vec<String> = std::fs::read_dir(dir.path().join("res"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    files.sort();
    assert_eq!(
        files,
        ["bisim.txt", "lts.dot", "lts.txt", "report.json", "report.txt", "summary.txt", "trace.txt"]
    );
}
