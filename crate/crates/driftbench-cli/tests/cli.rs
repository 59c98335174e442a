//! End-to-end tests of the compiled binary: exit codes, determinism, and
//! the generate → run → analyze pipeline.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_driftbench"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "expected success for {args:?}\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn exit_code(args: &[&str]) -> i32 {
    bin().args(args).output().expect("binary runs").status.code().expect("has exit code")
}

fn generate(dir: &Path, name: &str, seed: &str) -> String {
    let out = dir.join(name).to_string_lossy().into_owned();
    run_ok(&["generate", "--seed", seed, "--count-per-domain", "4", "--out", &out]);
    out
}

#[test]
fn generate_same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let a = generate(dir.path(), "a.jsonl", "11");
    let b = generate(dir.path(), "b.jsonl", "11");
    let c = generate(dir.path(), "c.jsonl", "12");
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
}

#[test]
fn domain_filter_keeps_only_requested_problems() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("seating.jsonl").to_string_lossy().into_owned();
    run_ok(&[
        "generate",
        "--seed",
        "11",
        "--count-per-domain",
        "4",
        "--domains",
        "seating",
        "--out",
        &out,
    ]);
    let body = std::fs::read_to_string(&out).unwrap();
    assert!(body.contains("seating_"));
    assert!(!body.contains("logic_grid_"));
    assert!(!body.contains("scheduling_"));
}

#[test]
fn pipeline_runs_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = generate(dir.path(), "corpus.jsonl", "11");
    let trace1 = dir.path().join("t1.jsonl").to_string_lossy().into_owned();
    let trace2 = dir.path().join("t2.jsonl").to_string_lossy().into_owned();
    let out = run_ok(&["run", "--corpus", &corpus, "--seed", "5", "--out", &trace1]);
    let stdout = String::from_utf8_lossy(&out.stdout).into_owned();
    assert!(stdout.contains("direct: 100.0%"), "oracle should be perfect: {stdout}");
    run_ok(&["run", "--corpus", &corpus, "--seed", "5", "--out", &trace2]);
    assert_eq!(std::fs::read(&trace1).unwrap(), std::fs::read(&trace2).unwrap());

    let report = dir.path().join("report").to_string_lossy().into_owned();
    run_ok(&[
        "analyze", "--traces", &format!("oracle={trace1}"), "--out-dir", &report,
        "--replicates", "200", "--rounds", "200",
    ]);
    for table in ["accuracy.csv", "lift.csv", "inference.csv", "report.md", "report.json"] {
        assert!(dir.path().join("report").join(table).exists(), "missing {table}");
    }
}

#[test]
fn config_file_fills_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = generate(dir.path(), "corpus.jsonl", "11");
    let config = dir.path().join("run.conf");
    let flag_trace = dir.path().join("flag.jsonl").to_string_lossy().into_owned();
    let conf_trace = dir.path().join("conf.jsonl");
    std::fs::write(
        &config,
        format!(
            "# pipeline defaults\ncorpus={corpus}\nout={}\nmethods=direct\nseed=5\n",
            conf_trace.display()
        ),
    )
    .unwrap();
    let cfg = config.to_string_lossy().into_owned();

    run_ok(&["run", "--config", &cfg]);
    assert!(conf_trace.exists());

    // The --out flag overrides the file; everything else still comes from it.
    run_ok(&["run", "--config", &cfg, "--out", &flag_trace]);
    let body = std::fs::read_to_string(&flag_trace).unwrap();
    assert!(body.contains("\"method\":\"direct\""));
    assert!(!body.contains("\"method\":\"cot\""));
}

#[test]
fn mock_policy_file_shapes_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = generate(dir.path(), "corpus.jsonl", "11");
    let policy = dir.path().join("faulty.conf");
    std::fs::write(&policy, "p_drift=1.0\nrepair_competence=0.0\n").unwrap();
    let trace = dir.path().join("faulty.jsonl").to_string_lossy().into_owned();
    let out = run_ok(&[
        "run", "--corpus", &corpus, "--methods", "direct",
        "--mock-policy", &policy.to_string_lossy(), "--out", &trace,
    ]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("direct: 0.0%"), "always-drifting agent: {stdout}");
}

#[test]
fn fixtures_replay_cleanly() {
    let out = run_ok(&["fixtures"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("all fixture marks reproduced"));
    assert!(stdout.contains("baseline 1/4 (expected 1), repair 4/4 (expected 4)"));
    assert!(stdout.contains("baseline 0/5 (expected 0), repair 5/5 (expected 5)"));
    assert!(stdout.contains("baseline 1/4 (expected 1), repair 3/4 (expected 3)"));
}

#[test]
fn selftest_passes() {
    let out = run_ok(&["analyze", "--selftest"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("all 14 self-checks passed"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(exit_code(&["generate"]), 2, "missing --out");
    assert_eq!(exit_code(&["generate", "--paper-scale", "--seed", "1", "--out", "x"]), 2);
    assert_eq!(exit_code(&["run", "--corpus", "x", "--out", "y", "--methods", "static"]), 2);
    assert_eq!(exit_code(&["analyze", "--out-dir", "z"]), 2, "no traces");
    assert_eq!(exit_code(&["nonsense"]), 2);
}

#[test]
fn runtime_failures_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.jsonl").to_string_lossy().into_owned();
    let out = dir.path().join("t.jsonl").to_string_lossy().into_owned();
    assert_eq!(exit_code(&["run", "--corpus", &missing, "--out", &out]), 1);
}

#[test]
fn analyze_rejects_traces_from_different_corpora() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_a = generate(dir.path(), "a.jsonl", "11");
    let corpus_b = generate(dir.path(), "b.jsonl", "12");
    let trace_a = dir.path().join("ta.jsonl").to_string_lossy().into_owned();
    let trace_b = dir.path().join("tb.jsonl").to_string_lossy().into_owned();
    run_ok(&["run", "--corpus", &corpus_a, "--methods", "direct", "--out", &trace_a]);
    run_ok(&["run", "--corpus", &corpus_b, "--methods", "direct", "--out", &trace_b]);
    let report = dir.path().join("report").to_string_lossy().into_owned();
    assert_eq!(
        exit_code(&[
            "analyze",
            "--traces",
            &format!("a={trace_a}"),
            "--traces",
            &format!("b={trace_b}"),
            "--out-dir",
            &report,
        ]),
        1
    );
}
