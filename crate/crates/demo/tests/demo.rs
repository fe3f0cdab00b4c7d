// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

use colgraph_demo::{compare_modes, run_algorithm, value_histogram};
use serde_json::Value;

const PATH4: &str = "# path\n0 1\n1 2\n2 3\n";
const CYCLE2: &str = "0 1\n1 0\n";

fn parse(s: &str) -> Value {
    serde_json::from_str(s).expect("valid json")
}

#[test]
fn sssp_table_and_report() {
    let v = parse(&run_algorithm(PATH4, true, "sssp", "sql", Some(0.0), 0));
    assert_eq!(v["table"]["columns"], serde_json::json!(["id", "d"]));
    assert_eq!(
        v["table"]["rows"],
        serde_json::json!([[0, 0], [1, 1], [2, 2], [3, 3]])
    );
    assert_eq!(v["report"]["iterations"].as_array().unwrap().len(), 4);
}

#[test]
fn every_mode_runs_cc() {
    for mode in ["sql", "udf", "shm"] {
        let v = parse(&run_algorithm(PATH4, false, "cc", mode, None, 0));
        assert_eq!(
            v["table"]["rows"],
            serde_json::json!([[0, 0], [1, 0], [2, 0], [3, 0]]),
            "{mode}"
        );
    }
}

#[test]
fn overlap_with_threshold() {
    let v = parse(&run_algorithm(
        "0 2\n0 3\n0 4\n1 2\n1 3\n1 4\n",
        true,
        "overlap",
        "sql",
        None,
        2,
    ));
    assert_eq!(v["table"]["rows"], serde_json::json!([[0, 1, 3]]));
}

#[test]
fn errors_are_json() {
    let cases = [
        run_algorithm("0 x\n", true, "cc", "sql", None, 0),
        run_algorithm(PATH4, true, "bfs", "sql", None, 0),
        run_algorithm(PATH4, true, "sssp", "sql", None, 0),
        run_algorithm(PATH4, true, "sssp", "sql", Some(0.5), 0),
        run_algorithm(PATH4, true, "overlap", "udf", None, 0),
        value_histogram(PATH4, true, "pagerank", None, 0),
    ];
    for c in cases {
        assert!(parse(&c)["error"].is_string(), "{c}");
    }
}

#[test]
fn modes_agree_on_pagerank() {
    let edges: String = (0..40)
        .map(|i| format!("{i} {}\n{i} {}\n", (i * 7 + 1) % 40, (i * 3 + 2) % 40))
        .collect();
    let v = parse(&compare_modes(&edges, true, "pagerank", None));
    let modes = v["modes"].as_array().unwrap();
    assert_eq!(modes.len(), 3);
    for m in modes {
        assert!(m["max_abs_diff"].as_f64().unwrap() <= 1e-12, "{m}");
    }
    let shm = modes.iter().find(|m| m["mode"] == "shm").unwrap();
    assert_eq!(shm["bytes_written"], 0);
}

#[test]
fn one_hop_compares_sql_only() {
    let v = parse(&compare_modes("0 1\n1 2\n", false, "weakties", None));
    assert_eq!(v["modes"].as_array().unwrap().len(), 1);
}

#[test]
fn histogram_of_ranks() {
    let v = parse(&value_histogram(CYCLE2, true, "pagerank", None, 4));
    assert_eq!(v["counts"], serde_json::json!([0, 0, 0, 2]));
    assert_eq!(v["column"], "rank");
}
