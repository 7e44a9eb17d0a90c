//! End-to-end tests of the binary: exit codes, determinism, and file
//! formats.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dci8"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn temp_path(name: &str) -> PathBuf {
    let mut dir = std::env::temp_dir();
    dir.push(format!("dci8-test-{}-{}", std::process::id(), name));
    dir
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

fn write_file(path: &Path, content: &str) {
    std::fs::write(path, content).unwrap();
}

#[test]
fn refute_then_verify_roundtrip() {
    let cert = temp_path("roundtrip.json");
    let out = run(&[
        "refute",
        "--k",
        "1",
        "--r",
        "1",
        "--out",
        cert.to_str().unwrap(),
    ]);
    assert_eq!(
        code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );

    let verify = run(&["verify", cert.to_str().unwrap()]);
    assert_eq!(code(&verify), 0);
    let stdout = String::from_utf8_lossy(&verify.stdout);
    assert!(stdout.contains("certificate OK"));
    std::fs::remove_file(cert).ok();
}

#[test]
fn refute_is_deterministic() {
    let first = temp_path("det-a.json");
    let second = temp_path("det-b.json");
    for path in [&first, &second] {
        let out = run(&[
            "refute",
            "--k",
            "3",
            "--r",
            "1",
            "--seed",
            "0",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
    }
    let a = std::fs::read(&first).unwrap();
    let b = std::fs::read(&second).unwrap();
    assert_eq!(a, b, "same seed must give byte-identical certificates");
    std::fs::remove_file(first).ok();
    std::fs::remove_file(second).ok();
}

#[test]
fn output_is_independent_of_job_count() {
    let serial = temp_path("jobs1.json");
    let parallel = temp_path("jobs4.json");
    for (path, jobs) in [(&serial, "1"), (&parallel, "4")] {
        let out = run(&[
            "refute",
            "--k",
            "3",
            "--r",
            "1",
            "--jobs",
            jobs,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
    }
    assert_eq!(
        std::fs::read(&serial).unwrap(),
        std::fs::read(&parallel).unwrap()
    );
    std::fs::remove_file(serial).ok();
    std::fs::remove_file(parallel).ok();
}

#[test]
fn refute_rejects_bad_parameters() {
    let out = run(&["refute", "--k", "2", "--r", "1", "--out", "/dev/null"]);
    assert_eq!(code(&out), 64);
    let out = run(&["refute", "--k", "3", "--r", "2", "--out", "/dev/null"]);
    assert_eq!(code(&out), 64);
}

#[test]
fn refute_reports_unwritable_output() {
    let out = run(&[
        "refute",
        "--k",
        "1",
        "--r",
        "1",
        "--out",
        "/nonexistent-dir/cert.json",
    ]);
    assert_eq!(code(&out), 73);
}

#[test]
fn verify_distinguishes_data_errors_from_failed_checks() {
    let missing = run(&["verify", "/nonexistent/cert.json"]);
    assert_eq!(code(&missing), 65);

    let truncated = temp_path("truncated.json");
    write_file(&truncated, "{\"params\": {\"k\": 1");
    let out = run(&["verify", truncated.to_str().unwrap()]);
    assert_eq!(code(&out), 65);
    std::fs::remove_file(&truncated).ok();

    // tamper with S: still valid JSON, but the checks must fail
    let cert = temp_path("tamper.json");
    let out = run(&[
        "refute",
        "--k",
        "1",
        "--r",
        "1",
        "--out",
        cert.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&cert).unwrap();
    let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let s = value["witness"]["S"].as_array().unwrap().clone();
    let replacement: u64 = (1..8)
        .find(|x| !s.iter().any(|v| v.as_u64() == Some(*x)))
        .unwrap();
    value["witness"]["S"][0] = serde_json::json!(replacement);
    write_file(&cert, &serde_json::to_string_pretty(&value).unwrap());
    let out = run(&["verify", cert.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("failed:"),
        "stderr names the failed check: {}",
        stderr
    );
    std::fs::remove_file(&cert).ok();
}

#[test]
fn two_closure_of_a_cyclic_group() {
    let gens = temp_path("c8.gens");
    write_file(&gens, "cyc(8): (0 1 2 3 4 5 6 7)\n");
    let out = run(&["two-closure", gens.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("order 8"));
    assert!(stdout.contains("closure order 8"));
    std::fs::remove_file(&gens).ok();
}

#[test]
fn two_closure_of_the_degree8_ambient_group() {
    let gens = temp_path("g11.gens");
    write_file(
        &gens,
        "cyc(8): (0 1 2 3 4 5 6 7)\ncyc(8): (0 1 6 7 4 5 2 3)\n",
    );
    let out = run(&["two-closure", gens.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("order 16"));
    assert!(stdout.contains("closure order 16"));
    std::fs::remove_file(&gens).ok();
}

#[test]
fn two_closure_rejects_bad_input() {
    let empty = temp_path("empty.gens");
    write_file(&empty, "# nothing\n");
    let out = run(&["two-closure", empty.to_str().unwrap()]);
    assert_eq!(code(&out), 65);
    std::fs::remove_file(&empty).ok();

    let big = temp_path("big.gens");
    write_file(&big, "cyc(100): (0 1)\n");
    let out = run(&["two-closure", big.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    std::fs::remove_file(&big).ok();
}

#[test]
fn brute_dci_exit_codes() {
    let out = run(&["brute-dci", "c8"]);
    assert_eq!(code(&out), 1);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("S={"), "violations listed: {}", stdout);

    let out = run(&["brute-dci", "c3"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("DCI confirmed"));

    let out = run(&["brute-dci", "c9"]);
    assert_eq!(code(&out), 64);

    let out = run(&["brute-dci", "nonsense"]);
    assert_eq!(code(&out), 64);
}

#[test]
fn export_dot_writes_labeled_digraph() {
    let cert = temp_path("export.json");
    let out = run(&[
        "refute",
        "--k",
        "1",
        "--r",
        "1",
        "--out",
        cert.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);

    let dot = temp_path("witness.dot");
    let out = run(&[
        "export-dot",
        cert.to_str().unwrap(),
        "--out",
        dot.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("digraph"));
    assert!(text.contains("label=\"(0,0,0)\""));
    assert!(text.contains("->"));

    // unwritable output path
    let out = run(&[
        "export-dot",
        cert.to_str().unwrap(),
        "--out",
        "/nonexistent-dir/w.dot",
    ]);
    assert_eq!(code(&out), 73);

    // colored certificates cannot be exported
    let text = std::fs::read_to_string(&cert).unwrap();
    let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
    value["witness"]["kind"] = serde_json::json!("colored");
    let s = value["witness"]["S"].clone();
    let t = value["witness"]["T"].clone();
    value["witness"]["S"] = serde_json::json!([s]);
    value["witness"]["T"] = serde_json::json!([t]);
    let colored = temp_path("colored.json");
    write_file(&colored, &serde_json::to_string_pretty(&value).unwrap());
    let out = run(&[
        "export-dot",
        colored.to_str().unwrap(),
        "--out",
        dot.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 4);

    std::fs::remove_file(&cert).ok();
    std::fs::remove_file(&dot).ok();
    std::fs::remove_file(&colored).ok();
}

#[test]
fn usage_errors_exit_64() {
    let out = run(&["no-such-command"]);
    assert_eq!(code(&out), 64);
    let out = run(&["refute", "--k", "3"]);
    assert_eq!(code(&out), 64);
    let out = bin()
        .args(["--jobs", "0", "brute-dci", "c3"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 64);
}

#[test]
fn help_exits_cleanly() {
    let out = run(&["--help"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("Usage"));
}
