//! End-to-end tests of the snaplab binary: the simulate/acquire/evaluate
//! pipeline, file round-trips, manifest reproducibility, and exit codes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_snaplab"))
}

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("snaplab-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn pipeline_frozen_snapshot_is_all_true() {
    let dir = workdir("pipeline");
    let trace = dir.join("tr.jsonl");
    let snap = dir.join("snap.jsonl");
    run_ok(&[
        "simulate",
        "--regions",
        "2",
        "--processes",
        "2",
        "--events",
        "3",
        "--seed",
        "9",
        "--out",
        path(&trace),
    ]);
    run_ok(&[
        "acquire",
        "--trace",
        path(&trace),
        "--strategy",
        "frozen",
        "--at",
        "0",
        "--out",
        path(&snap),
    ]);
    let out = run_ok(&[
        "evaluate",
        "--trace",
        path(&trace),
        "--snapshot",
        path(&snap),
        "--tau",
        "0",
    ]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let verdict = &report["verdict"];
    for key in [
        "correct",
        "instantaneous",
        "quasi_instantaneous",
        "causal",
        "restrictive_integrity",
        "permissive_integrity",
    ] {
        assert_eq!(verdict[key], serde_json::Value::Bool(true), "{key}");
    }
    assert_eq!(report["vc_consistent"], serde_json::Value::Bool(true));
    assert_eq!(report["rt_consistent"], serde_json::Value::Bool(true));
}

#[test]
fn trace_files_are_deterministic_and_reproducible_from_the_manifest() {
    let dir = workdir("manifest");
    let first = dir.join("a.jsonl");
    let second = dir.join("b.jsonl");
    run_ok(&[
        "simulate",
        "--regions",
        "3",
        "--processes",
        "2",
        "--events",
        "12",
        "--seed",
        "41",
        "--regime",
        "all-modifying",
        "--out",
        path(&first),
    ]);

    // Re-run with the flags recorded in the manifest.
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("a.jsonl.manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["subcommand"], "simulate");
    let args = &manifest["args"];
    let seed = manifest["seed"].as_u64().unwrap().to_string();
    run_ok(&[
        "simulate",
        "--regions",
        args["regions"].as_str().unwrap(),
        "--processes",
        args["processes"].as_str().unwrap(),
        "--events",
        args["events"].as_str().unwrap(),
        "--regime",
        args["regime"].as_str().unwrap(),
        "--workload",
        args["workload"].as_str().unwrap(),
        "--seed",
        &seed,
        "--out",
        path(&second),
    ]);
    assert_eq!(
        fs::read_to_string(&first).unwrap(),
        fs::read_to_string(&second).unwrap()
    );
}

#[test]
fn snapshot_files_round_trip_through_acquire_and_evaluate() {
    let dir = workdir("roundtrip");
    let trace = dir.join("tr.jsonl");
    let snap = dir.join("cow.jsonl");
    run_ok(&[
        "simulate",
        "--regions",
        "4",
        "--processes",
        "3",
        "--events",
        "25",
        "--seed",
        "5",
        "--regime",
        "mixed-with-reads",
        "--read-fraction",
        "0.4",
        "--out",
        path(&trace),
    ]);
    run_ok(&[
        "acquire",
        "--trace",
        path(&trace),
        "--strategy",
        "cow",
        "--start",
        "3",
        "--delay",
        "2",
        "--out",
        path(&snap),
    ]);
    let out = run_ok(&[
        "evaluate",
        "--trace",
        path(&trace),
        "--snapshot",
        path(&snap),
        "--tau",
        "3",
    ]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // Copy-on-write guarantees both of these whenever tau is its start time.
    assert_eq!(
        report["verdict"]["quasi_instantaneous"],
        serde_json::Value::Bool(true)
    );
    assert_eq!(
        report["verdict"]["permissive_integrity"],
        serde_json::Value::Bool(true)
    );
}

#[test]
fn lattice_emits_the_five_cut_graph() {
    let dir = workdir("lattice");
    let trace = dir.join("tr.jsonl");
    run_ok(&[
        "simulate",
        "--regions",
        "2",
        "--processes",
        "2",
        "--events",
        "3",
        "--seed",
        "9",
        "--out",
        path(&trace),
    ]);
    let out = run_ok(&["lattice", "--trace", path(&trace)]);
    let dot = String::from_utf8(out.stdout).unwrap();
    assert_eq!(dot.matches("label=\"{").count(), 5);
    assert_eq!(dot.matches(" -> ").count(), 5);
}

#[test]
fn diagram_draws_rails_and_cut_markers() {
    let dir = workdir("diagram");
    let trace = dir.join("tr.jsonl");
    let snap = dir.join("snap.jsonl");
    let dot_file = dir.join("d.dot");
    run_ok(&[
        "simulate",
        "--regions",
        "2",
        "--processes",
        "2",
        "--events",
        "3",
        "--seed",
        "9",
        "--out",
        path(&trace),
    ]);
    run_ok(&[
        "acquire",
        "--trace",
        path(&trace),
        "--strategy",
        "sequential",
        "--start",
        "0",
        "--delay",
        "1",
        "--out",
        path(&snap),
    ]);
    run_ok(&[
        "diagram",
        "--trace",
        path(&trace),
        "--snapshot",
        path(&snap),
        "--out",
        path(&dot_file),
    ]);
    let dot = fs::read_to_string(&dot_file).unwrap();
    assert!(dot.contains("cluster_r0"));
    assert!(dot.contains("cut_r0"));
    assert!(dot.contains("cut_r1"));
    assert!(dot_file.with_file_name("d.dot.manifest.json").exists());
}

#[test]
fn verify_writes_a_clean_report_and_exits_zero() {
    let dir = workdir("verify");
    let report_file = dir.join("report.json");
    run_ok(&[
        "verify",
        "--cases",
        "300",
        "--seed",
        "7",
        "--out",
        path(&report_file),
    ]);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report_file).unwrap()).unwrap();
    assert_eq!(report["cases"], 300);
    for imp in report["implications"].as_array().unwrap() {
        assert_eq!(imp["violations"], 0, "{}", imp["name"]);
    }
    for witness in report["non_implications"].as_array().unwrap() {
        assert!(!witness["witness"].is_null(), "{}", witness["name"]);
    }
}

#[test]
fn seed_env_var_is_the_default_seed() {
    let dir = workdir("envseed");
    let explicit = dir.join("explicit.jsonl");
    let via_env = dir.join("env.jsonl");
    run_ok(&[
        "simulate",
        "--regions",
        "2",
        "--processes",
        "2",
        "--events",
        "8",
        "--seed",
        "123",
        "--out",
        path(&explicit),
    ]);
    let out = bin()
        .env("SNAPLAB_SEED", "123")
        .args([
            "simulate",
            "--regions",
            "2",
            "--processes",
            "2",
            "--events",
            "8",
            "--out",
            path(&via_env),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(
        fs::read_to_string(&explicit).unwrap(),
        fs::read_to_string(&via_env).unwrap()
    );
}

#[test]
fn exit_codes_follow_the_convention() {
    let dir = workdir("exitcodes");
    // Unknown flag: usage error.
    assert_eq!(run(&["simulate", "--bogus"]).status.code(), Some(64));
    // Unreadable input: I/O error.
    let missing = dir.join("missing.jsonl");
    let out_file = dir.join("out.jsonl");
    let out = run(&[
        "acquire",
        "--trace",
        path(&missing),
        "--strategy",
        "frozen",
        "--at",
        "0",
        "--out",
        path(&out_file),
    ]);
    assert_eq!(out.status.code(), Some(74));
    // Malformed input: data error.
    let garbled = dir.join("garbled.jsonl");
    fs::write(
        &garbled,
        "{\"format_version\":1,\"region_count\":2}\nnot json\n",
    )
    .unwrap();
    let out = run(&[
        "evaluate",
        "--trace",
        path(&garbled),
        "--snapshot",
        path(&garbled),
        "--tau",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(65));
    // Help and version exit cleanly.
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn frozen_strategy_requires_its_copy_instant() {
    let dir = workdir("frozenat");
    let trace = dir.join("tr.jsonl");
    run_ok(&[
        "simulate",
        "--regions",
        "2",
        "--processes",
        "1",
        "--events",
        "2",
        "--seed",
        "1",
        "--out",
        path(&trace),
    ]);
    let out = run(&[
        "acquire",
        "--trace",
        path(&trace),
        "--strategy",
        "frozen",
        "--out",
        path(&dir.join("s.jsonl")),
    ]);
    assert_eq!(out.status.code(), Some(64));
}
