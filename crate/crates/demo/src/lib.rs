// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

//! Browser entry points. Each takes edge-list text and returns a JSON string;
//! failures come back as `{"error": "..."}`.
//!
//! Everything runs on one partition and one worker since the page has a
//! single thread.

use colgraph::analytics::equi_width_histogram;
use colgraph::run::{run, Algorithm, Mode, RunResult, RunSpec};
use colgraph::storage::{parse_edge_list, ColumnTable, GraphStore, LoadOptions, Scalar};
use colgraph::{Error, Result};
use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

fn graph(edges: &str, directed: bool) -> Result<GraphStore> {
    parse_edge_list(edges, &LoadOptions::directed(directed).with_partitions(1))
}

fn spec(algo: &str, mode: &str, source: Option<f64>, threshold: i64) -> Result<RunSpec> {
    let mut spec = RunSpec::new(algo.parse()?, mode.parse()?);
    spec.workers = 1;
    spec.threshold = threshold;
    spec.source = match source {
        Some(s) if s.fract() != 0.0 || !s.is_finite() => {
            return Err(Error::Domain(format!("source {s} is not a vertex id")))
        }
        Some(s) => Some(s as i64),
        None => None,
    };
    if spec.algorithm == Algorithm::Sssp && spec.source.is_none() {
        return Err(Error::Domain("sssp needs a source vertex".into()));
    }
    Ok(spec)
}

fn scalar(s: Scalar) -> Value {
    match s {
        Scalar::Null => Value::Null,
        Scalar::Int(v) => v.into(),
        Scalar::Float(v) => v.into(),
        Scalar::Str(v) => v.as_ref().into(),
        Scalar::Bool(v) => v.into(),
    }
}

fn table_json(table: &ColumnTable) -> Value {
    let columns: Vec<&str> = table.columns().iter().map(|c| c.name.as_str()).collect();
    let rows: Vec<Value> = (0..table.row_count())
        .map(|i| table.row(i).into_iter().map(scalar).collect())
        .collect();
    json!({ "columns": columns, "rows": rows })
}

fn respond(result: Result<Value>) -> String {
    match result {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

fn run_json(r: &RunResult) -> Value {
    json!({ "table": table_json(&r.table), "report": r.report })
}

/// Runs `algo` (pagerank, sssp, cc, overlap, weakties) in `mode` (sql, udf,
/// shm). Returns the result table and the per-iteration report.
#[wasm_bindgen]
pub fn run_algorithm(
    edges: &str,
    directed: bool,
    algo: &str,
    mode: &str,
    source: Option<f64>,
    threshold: i32,
) -> String {
    respond((|| {
        let g = graph(edges, directed)?;
        let out = run(&g, "input", &spec(algo, mode, source, threshold.into())?)?;
        Ok(run_json(&out))
    })())
}

/// Runs `algo` in every mode it supports and reports the cost of each next to
/// the largest value difference from the sql result.
#[wasm_bindgen]
pub fn compare_modes(edges: &str, directed: bool, algo: &str, source: Option<f64>) -> String {
    respond((|| {
        let g = graph(edges, directed)?;
        let algorithm: Algorithm = algo.parse()?;
        let column = algorithm.value_column();
        let mut baseline: Option<Vec<f64>> = None;
        let mut modes = Vec::new();
        for &mode in algorithm.modes() {
            let out = run(&g, "input", &spec(algo, mode.name(), source, 0)?)?;
            let values: Vec<f64> = match out.table.f64_column(column) {
                Ok(v) => v.to_vec(),
                Err(_) => out
                    .table
                    .i64_column(column)?
                    .iter()
                    .map(|&v| v as f64)
                    .collect(),
            };
            let max_diff = baseline
                .get_or_insert_with(|| values.clone())
                .iter()
                .zip(&values)
                .fold(
                    0.0f64,
                    |m, (a, b)| {
                        if a == b {
                            m
                        } else {
                            m.max((a - b).abs())
                        }
                    },
                );
            let t = out.report.totals;
            modes.push(json!({
                "mode": mode.name(),
                "iterations": out.report.iterations.len(),
                "wall_ms": t.wall_ms,
                "rows_updated": t.rows_updated,
                "bytes_read": t.bytes_read,
                "bytes_written": t.bytes_written,
                "max_abs_diff": max_diff,
            }));
        }
        Ok(json!({ "algorithm": algorithm.name(), "column": column, "modes": modes }))
    })())
}

/// Runs `algo` in sql mode and buckets its value column into `buckets`
/// equal-width ranges.
#[wasm_bindgen]
pub fn value_histogram(
    edges: &str,
    directed: bool,
    algo: &str,
    source: Option<f64>,
    buckets: u32,
) -> String {
    respond((|| {
        let g = graph(edges, directed)?;
        let algorithm: Algorithm = algo.parse()?;
        let out = run(&g, "input", &spec(algo, Mode::Sql.name(), source, 0)?)?;
        let h = equi_width_histogram(&out.table, algorithm.value_column(), buckets as usize)?;
        Ok(json!({
            "column": algorithm.value_column(),
            "min": h.min,
            "max": h.max,
            "width": h.width(),
            "counts": h.counts,
        }))
    })())
}
