//! Shared helpers for driving the `pfk` binary from integration tests.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

/// Directory holding the example theories shipped with the repository.
pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .canonicalize()
        .expect("corpus directory exists")
}

pub fn corpus_file(name: &str) -> PathBuf {
    corpus_dir().join(name)
}

/// Run the binary with the given arguments in an unspecified directory.
pub fn pfk(args: &[&str]) -> Output {
    pfk_with(None, &[], args)
}

/// Run the binary with a working directory and extra environment variables.
pub fn pfk_with(cwd: Option<&Path>, env: &[(&str, &str)], args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pfk"));
    cmd.args(args);
    if let Some(dir) = cwd {
        cmd.current_dir(dir);
    }
    // Keep resolution deterministic: tests opt in to a search path explicitly.
    cmd.env_remove("PFK_PATH");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

pub fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("process exited normally")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

/// Parse a `--format json` report.
pub fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not valid JSON: {e}\n--- stdout ---\n{}",
            stdout(out)
        )
    })
}

pub fn records(report: &serde_json::Value) -> &Vec<serde_json::Value> {
    report["records"].as_array().expect("records array")
}

/// Count report records with the given kind.
pub fn count_kind(report: &serde_json::Value, kind: &str) -> usize {
    records(report)
        .iter()
        .filter(|r| r["kind"] == kind)
        .count()
}

pub fn all_ok(report: &serde_json::Value) -> bool {
    records(report).iter().all(|r| r["status"] == "ok")
}
