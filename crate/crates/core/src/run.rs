// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

//! One entry point for running any algorithm in any execution mode.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use web_time::Instant;

use crate::algos::{
    connected_components, pagerank, sssp_with, AlgoConfig, AlgoOutput, SsspOptions,
};
use crate::analytics::{strong_overlap, weak_ties};
use crate::error::{Error, Result};
use crate::report::{IterationRow, RunReport};
use crate::runtime::{
    run_shared_memory, run_table_udf, ProgramArgs, ProgramRegistry, RuntimeOptions, RuntimeOutput,
};
use crate::storage::{default_partitions, ColumnTable, GraphStore};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Relational plans on the executor.
    Sql,
    /// Vertex program as a table UDF, materializing every superstep.
    Udf,
    /// Vertex program on the shared-memory engine.
    Shm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    PageRank,
    Sssp,
    Cc,
    Overlap,
    WeakTies,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Sql, Mode::Udf, Mode::Shm];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Sql => "sql",
            Mode::Udf => "udf",
            Mode::Shm => "shm",
        }
    }
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::PageRank,
        Algorithm::Sssp,
        Algorithm::Cc,
        Algorithm::Overlap,
        Algorithm::WeakTies,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::PageRank => "pagerank",
            Algorithm::Sssp => "sssp",
            Algorithm::Cc => "cc",
            Algorithm::Overlap => "overlap",
            Algorithm::WeakTies => "weakties",
        }
    }

    pub fn modes(self) -> &'static [Mode] {
        match self {
            Algorithm::Overlap | Algorithm::WeakTies => &[Mode::Sql],
            _ => &Mode::ALL,
        }
    }

    /// Name of the value column in the result table.
    pub fn value_column(self) -> &'static str {
        match self {
            Algorithm::PageRank => "rank",
            Algorithm::Sssp => "d",
            Algorithm::Cc => "component",
            Algorithm::Overlap => "common",
            Algorithm::WeakTies => "c",
        }
    }
}

macro_rules! named_enum {
    ($t:ty) => {
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $t {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                <$t>::ALL
                    .into_iter()
                    .find(|x| x.name() == s)
                    .ok_or_else(|| {
                        let names: Vec<&str> = <$t>::ALL.iter().map(|x| x.name()).collect();
                        Error::Domain(format!(
                            "unknown {} {s:?}; expected one of {}",
                            stringify!($t),
                            names.join(", ")
                        ))
                    })
            }
        }
    };
}
named_enum!(Mode);
named_enum!(Algorithm);

#[derive(Debug, Clone)]
pub struct RunSpec {
    pub algorithm: Algorithm,
    pub mode: Mode,
    pub iterations: usize,
    pub source: Option<i64>,
    pub threshold: i64,
    pub config: AlgoConfig,
    pub workers: usize,
    pub weighted: bool,
    pub spill_dir: Option<PathBuf>,
}

impl RunSpec {
    pub fn new(algorithm: Algorithm, mode: Mode) -> Self {
        RunSpec {
            algorithm,
            mode,
            iterations: 10,
            source: None,
            threshold: 0,
            config: AlgoConfig::default(),
            workers: default_partitions(),
            weighted: false,
            spill_dir: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    /// `(id, value)` ordered by id; overlap is `(n1, n2, common)`.
    pub table: ColumnTable,
    pub report: RunReport,
}

fn sql_report(out: &AlgoOutput) -> Vec<IterationRow> {
    out.iterations
        .iter()
        .map(|r| {
            IterationRow::new(
                r.iteration as u64,
                r.wall,
                r.updates as u64,
                r.bytes_read,
                r.bytes_written,
            )
        })
        .collect()
}

fn runtime_report(out: &RuntimeOutput) -> Vec<IterationRow> {
    out.supersteps
        .iter()
        .map(|s| {
            IterationRow::new(
                s.superstep,
                s.wall,
                s.active as u64,
                s.bytes_read,
                s.bytes_written,
            )
        })
        .collect()
}

/// Runs `spec` on `graph`. Results of the same algorithm have the same
/// schema in every mode.
pub fn run(graph: &GraphStore, dataset: &str, spec: &RunSpec) -> Result<RunResult> {
    let algo = spec.algorithm;
    if !algo.modes().contains(&spec.mode) {
        let modes: Vec<&str> = algo.modes().iter().map(|m| m.name()).collect();
        return Err(Error::Precondition(format!(
            "{algo} does not run in mode {}; valid modes: {}",
            spec.mode,
            modes.join(", ")
        )));
    }
    let source = || {
        spec.source
            .ok_or_else(|| Error::Domain(format!("{algo} needs a source vertex")))
    };
    let (table, rows) = match (algo, spec.mode) {
        (Algorithm::Overlap | Algorithm::WeakTies, _) => {
            let started = Instant::now();
            let table = if algo == Algorithm::Overlap {
                strong_overlap(graph, spec.threshold)?
            } else {
                weak_ties(graph, spec.threshold)?
            };
            let row = IterationRow::new(1, started.elapsed(), table.row_count() as u64, 0, 0);
            (table, vec![row])
        }
        (_, Mode::Sql) => {
            let out = match algo {
                Algorithm::PageRank => pagerank(graph, spec.iterations, &spec.config)?,
                Algorithm::Sssp => sssp_with(
                    graph,
                    source()?,
                    SsspOptions {
                        weighted: spec.weighted,
                    },
                    &spec.config,
                )?,
                _ => connected_components(graph, &spec.config)?,
            };
            let rows = sql_report(&out);
            (out.table, rows)
        }
        (_, mode) => {
            let args = ProgramArgs {
                source: spec.source,
                iterations: Some(spec.iterations),
                weighted: spec.weighted,
            };
            let program = ProgramRegistry::default().create(algo.name(), &args)?;
            let opts = RuntimeOptions {
                workers: spec.workers.max(1),
                spill_dir: spec.spill_dir.clone(),
                ..RuntimeOptions::default()
            };
            let out = if mode == Mode::Udf {
                run_table_udf(graph, program.as_ref(), &opts)?
            } else {
                run_shared_memory(graph, program.as_ref(), &opts)?
            };
            let rows = runtime_report(&out);
            let table = out
                .table
                .rename_columns(&["id", algo.value_column()])?
                .with_name(algo.name());
            (table, rows)
        }
    };
    let report = RunReport::new(dataset, algo.name(), spec.mode.name(), rows);
    Ok(RunResult { table, report })
}
