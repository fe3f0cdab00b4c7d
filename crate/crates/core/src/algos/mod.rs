// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

//! Iterative graph algorithms as driver loops over compiled relational plans.

mod cc;
mod delta;
pub mod messages;
mod pagerank;
mod sssp;

use std::time::Duration;

use serde::{Deserialize, Serialize};

pub use cc::connected_components;
pub use delta::{apply_delta, ApplyMode, VertexState};
pub use pagerank::{pagerank, pagerank_plans};
pub use sssp::{sssp, sssp_plan, sssp_with, SsspOptions, UNREACHED};

use crate::exec::{ExecOptions, ExecReport};
use crate::plan::{
    build_vertex_centric_plan, choose_physical, eliminate_message_table, eliminate_redundant_join,
    lower_vertex_compute, reverse_edges, with_sender_table, Plan, VertexComputeKind,
};
use crate::storage::{Catalog, ColumnTable};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Convergence {
    NoUpdates,
    FixedIterations(usize),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterationPolicy {
    /// Deltas smaller than this are applied in place; larger ones rebuild
    /// the vertex table.
    pub update_replace_threshold: usize,
    /// Only vertices updated in the previous iteration send messages.
    pub incremental: bool,
    /// Connected components sends from every vertex for this many
    /// iterations before switching to incremental.
    pub cc_full_update_iters: usize,
    /// Connected components propagates along and against edge direction on
    /// alternate iterations.
    pub cc_alternate_direction: bool,
    pub max_iterations: usize,
    pub convergence: Convergence,
}

pub const DEFAULT_UPDATE_REPLACE_THRESHOLD: usize = 5000;

impl Default for IterationPolicy {
    fn default() -> Self {
        IterationPolicy {
            update_replace_threshold: DEFAULT_UPDATE_REPLACE_THRESHOLD,
            incremental: true,
            cc_full_update_iters: 2,
            cc_alternate_direction: true,
            max_iterations: 10_000,
            convergence: Convergence::NoUpdates,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct AlgoConfig {
    pub exec: ExecOptions,
    pub policy: IterationPolicy,
}

#[derive(Debug, Clone, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Vertices whose value changed.
    pub updates: usize,
    pub mode: ApplyMode,
    pub wall: Duration,
    pub bytes_read: u64,
    pub bytes_written: u64,
    pub peak_live_rows: usize,
}

impl IterationRecord {
    fn new(iteration: usize) -> Self {
        IterationRecord {
            iteration,
            updates: 0,
            mode: ApplyMode::Update,
            wall: Duration::ZERO,
            bytes_read: 0,
            bytes_written: 0,
            peak_live_rows: 0,
        }
    }

    fn absorb(&mut self, report: &ExecReport) {
        self.wall += report.wall;
        self.bytes_read += report.bytes_read;
        self.bytes_written += report.bytes_written;
        self.peak_live_rows = self.peak_live_rows.max(report.peak_live_rows);
    }
}

#[derive(Debug, Clone)]
pub struct AlgoOutput {
    pub table: ColumnTable,
    pub iterations: Vec<IterationRecord>,
}

impl AlgoOutput {
    pub fn total_wall(&self) -> Duration {
        self.iterations.iter().map(|i| i.wall).sum()
    }
}

/// The relational plan for one iteration of a built-in vertex program
/// whose senders are read from `sender`: message elimination, lowering,
/// join elimination and physical choice, in that order.
pub fn compile_iteration(kind: VertexComputeKind, sender: &str, catalog: &Catalog) -> Result<Plan> {
    compile_iteration_with(kind, sender, false, catalog)
}

/// Like [`compile_iteration`]; with `reversed` messages travel from
/// `to_node` to `from_node`.
pub fn compile_iteration_with(
    kind: VertexComputeKind,
    sender: &str,
    reversed: bool,
    catalog: &Catalog,
) -> Result<Plan> {
    let plan = with_sender_table(&build_vertex_centric_plan(kind), sender);
    let mut plan =
        eliminate_redundant_join(&lower_vertex_compute(&eliminate_message_table(&plan)?)?);
    if reversed {
        plan = reverse_edges(&plan, "e");
    }
    choose_physical(&plan, catalog)
}
