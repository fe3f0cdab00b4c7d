// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

//! Per-iteration run reports with CSV and JSON forms.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "iteration,wall_ms,rows_updated,bytes_read,bytes_written";

/// One iteration or superstep. Byte counts come from the storage layer's
/// counters only; OS caching is not visible to them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRow {
    pub iteration: u64,
    pub wall_ms: f64,
    pub rows_updated: u64,
    pub bytes_read: u64,
    pub bytes_written: u64,
}

impl IterationRow {
    pub fn new(
        iteration: u64,
        wall: Duration,
        rows_updated: u64,
        bytes_read: u64,
        bytes_written: u64,
    ) -> Self {
        IterationRow {
            iteration,
            wall_ms: wall.as_secs_f64() * 1000.0,
            rows_updated,
            bytes_read,
            bytes_written,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Totals {
    pub wall_ms: f64,
    pub rows_updated: u64,
    pub bytes_read: u64,
    pub bytes_written: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub dataset: String,
    pub algorithm: String,
    pub mode: String,
    pub iterations: Vec<IterationRow>,
    pub totals: Totals,
    /// Allocator high-water mark during the run, when the caller tracked it.
    pub peak_memory_bytes_estimate: Option<u64>,
}

fn totals(rows: &[IterationRow]) -> Totals {
    rows.iter().fold(Totals::default(), |t, r| Totals {
        wall_ms: t.wall_ms + r.wall_ms,
        rows_updated: t.rows_updated + r.rows_updated,
        bytes_read: t.bytes_read + r.bytes_read,
        bytes_written: t.bytes_written + r.bytes_written,
    })
}

fn csv_error(e: csv::Error) -> Error {
    Error::Ingest {
        line: e.position().map_or(1, |p| p.line() as usize),
        message: e.to_string(),
    }
}

impl RunReport {
    pub fn new(dataset: &str, algorithm: &str, mode: &str, iterations: Vec<IterationRow>) -> Self {
        RunReport {
            dataset: dataset.to_string(),
            algorithm: algorithm.to_string(),
            mode: mode.to_string(),
            totals: totals(&iterations),
            iterations,
            peak_memory_bytes_estimate: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let report: RunReport = serde_json::from_str(text).map_err(|e| Error::Ingest {
            line: e.line(),
            message: e.to_string(),
        })?;
        if report.totals != totals(&report.iterations) {
            return Err(Error::Consistency(
                "report totals do not match its iterations".into(),
            ));
        }
        Ok(report)
    }

    /// `# key=value` lines for the run metadata, then the per-iteration
    /// table. Totals are implied by the rows.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# dataset={}\n# algorithm={}\n# mode={}\n",
            self.dataset, self.algorithm, self.mode
        );
        if let Some(peak) = self.peak_memory_bytes_estimate {
            out.push_str(&format!("# peak_memory_bytes_estimate={peak}\n"));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.iterations {
            w.serialize(row).expect("in-memory csv write");
        }
        if self.iterations.is_empty() {
            out.push_str(CSV_HEADER);
            out.push('\n');
        }
        out.push_str(
            &String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv is utf-8"),
        );
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut meta = std::collections::BTreeMap::new();
        for line in text.lines().take_while(|l| l.starts_with('#')) {
            if let Some((k, v)) = line.trim_start_matches('#').trim().split_once('=') {
                meta.insert(k.to_string(), v.to_string());
            }
        }
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let header: Vec<String> = reader
            .headers()
            .map_err(csv_error)?
            .iter()
            .map(str::to_string)
            .collect();
        if header.join(",") != CSV_HEADER {
            return Err(Error::Ingest {
                line: 1,
                message: format!("expected header {CSV_HEADER}"),
            });
        }
        let rows = reader
            .deserialize()
            .collect::<std::result::Result<Vec<IterationRow>, _>>()
            .map_err(csv_error)?;
        let get = |k: &str| meta.get(k).cloned().unwrap_or_default();
        let mut report = RunReport::new(&get("dataset"), &get("algorithm"), &get("mode"), rows);
        report.peak_memory_bytes_estimate = meta
            .get("peak_memory_bytes_estimate")
            .and_then(|v| v.parse().ok());
        Ok(report)
    }
}
