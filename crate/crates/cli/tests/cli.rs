// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

use std::path::Path;
use std::process::{Command, Output};

use colgraph::report::RunReport;

fn colgraph(store: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_colgraph"))
        .arg("--store-dir")
        .arg(store)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn load_fixture(dir: &Path, name: &str, text: &str, direction: &str) -> Output {
    let input = dir.join(format!("{name}.txt"));
    std::fs::write(&input, text).unwrap();
    colgraph(
        dir,
        &[
            "load",
            "--input",
            input.to_str().unwrap(),
            direction,
            "--name",
            name,
        ],
    )
}

const PATH4: &str = "# path\n0\t1\n1\t2\n2\t3\n";

#[test]
fn load_reports_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out = load_fixture(dir.path(), "path4", PATH4, "--directed");
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("vertices 4\n"), "{text}");
    assert!(text.contains("edges 3\n"), "{text}");
    assert!(text.contains("disk bytes "), "{text}");
}

#[test]
fn missing_input_is_io_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out = colgraph(
        dir.path(),
        &[
            "load",
            "--input",
            "/nonexistent/edges.txt",
            "--directed",
            "--name",
            "x",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("/nonexistent/edges.txt"));
}

#[test]
fn malformed_input_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let out = load_fixture(dir.path(), "bad", "0 1\n1 x\n", "--directed");
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
}

#[test]
fn direction_is_required() {
    let dir = tempfile::tempdir().unwrap();
    let out = colgraph(dir.path(), &["load", "--input", "x.txt", "--name", "x"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sssp_sql_on_path4() {
    let dir = tempfile::tempdir().unwrap();
    load_fixture(dir.path(), "path4", PATH4, "--directed");
    let result = dir.path().join("sssp.csv");
    let out = colgraph(
        dir.path(),
        &[
            "run",
            "--name",
            "path4",
            "--algo",
            "sssp",
            "--mode",
            "sql",
            "--source",
            "0",
            "--out",
            result.to_str().unwrap(),
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(
        std::fs::read_to_string(&result).unwrap(),
        "id,d\n0,0\n1,1\n2,2\n3,3\n"
    );
    let report = RunReport::from_csv(&stdout(&out)).unwrap();
    assert_eq!(report.iterations.len(), 4);
    assert_eq!(
        (report.algorithm.as_str(), report.mode.as_str()),
        ("sssp", "sql")
    );
    assert!(report.peak_memory_bytes_estimate.is_some_and(|p| p > 0));
}

#[test]
fn shm_pagerank_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    load_fixture(dir.path(), "path4", PATH4, "--directed");
    let out = colgraph(
        dir.path(),
        &[
            "run",
            "--name",
            "path4",
            "--algo",
            "pagerank",
            "--iterations",
            "10",
            "--mode",
            "shm",
            "--report",
            "json",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let report = RunReport::from_json(&stdout(&out)).unwrap();
    assert_eq!(report.totals.bytes_written, 0);
    assert!(dir.path().join("path4/results/pagerank-shm.csv").exists());
}

#[test]
fn one_hop_in_udf_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    load_fixture(dir.path(), "tri", "0 1\n1 2\n0 2\n", "--undirected");
    let out = colgraph(
        dir.path(),
        &[
            "run", "--name", "tri", "--algo", "weakties", "--mode", "udf",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).contains("valid modes: sql"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn unknown_algorithm_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = colgraph(
        dir.path(),
        &["run", "--name", "x", "--algo", "bfs", "--mode", "sql"],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_store_is_io_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out = colgraph(
        dir.path(),
        &["run", "--name", "nope", "--algo", "cc", "--mode", "sql"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn repeated_runs_match() {
    let dir = tempfile::tempdir().unwrap();
    let edges: String = (0..60)
        .map(|i| format!("{i} {}\n{i} {}\n", (i * 7 + 1) % 60, (i * 13 + 5) % 60))
        .collect();
    load_fixture(dir.path(), "g", &edges, "--directed");
    for mode in ["sql", "udf", "shm"] {
        let mut tables = Vec::new();
        for k in 0..2 {
            let path = dir.path().join(format!("pr-{mode}-{k}.csv"));
            let out = colgraph(
                dir.path(),
                &[
                    "run",
                    "--name",
                    "g",
                    "--algo",
                    "pagerank",
                    "--mode",
                    mode,
                    "--out",
                    path.to_str().unwrap(),
                ],
            );
            assert!(out.status.success(), "{}", stderr(&out));
            tables.push(std::fs::read_to_string(path).unwrap());
        }
        assert_eq!(tables[0], tables[1], "{mode}");
    }
}

#[test]
fn metadata_store_runs_overlap() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bip.txt");
    std::fs::write(&input, "0 2\n0 3\n0 4\n1 2\n1 3\n1 4\n").unwrap();
    let out = colgraph(
        dir.path(),
        &[
            "load",
            "--input",
            input.to_str().unwrap(),
            "--directed",
            "--name",
            "bip",
            "--metadata-seed",
            "7",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let result = dir.path().join("overlap.csv");
    let out = colgraph(
        dir.path(),
        &[
            "run",
            "--name",
            "bip",
            "--algo",
            "overlap",
            "--mode",
            "sql",
            "--threshold",
            "2",
            "--out",
            result.to_str().unwrap(),
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(
        std::fs::read_to_string(result).unwrap(),
        "n1,n2,common\n0,1,3\n"
    );
}

#[test]
fn verify_small_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = colgraph(dir.path(), &["verify", "--suite", "small"]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).contains("30 checks, 30 passed, 0 failed"));
}

#[test]
fn verify_random_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = colgraph(
        dir.path(),
        &[
            "verify", "--suite", "random", "--seed", "1", "--graphs", "25",
        ],
    );
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).contains("125 checks, 125 passed, 0 failed"));
}

#[test]
fn verify_with_fault_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = colgraph(
        dir.path(),
        &["verify", "--suite", "small", "--inject-fault"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL"));
}
