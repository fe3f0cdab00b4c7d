// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

use web_time::Instant;

use super::{compile_iteration, AlgoConfig, AlgoOutput, ApplyMode, IterationRecord, VertexState};
use crate::error::{Error, Result};
use crate::exec::execute;
use crate::expr::Params;
use crate::plan::{Plan, VertexComputeKind};
use crate::storage::{
    Catalog, Column, ColumnData, ColumnTable, GraphStore, TableRole, VERTEX_TABLE,
};

/// Distance of a vertex the source cannot reach (unit weights).
pub const UNREACHED: i64 = i64::MAX;

/// Table holding the vertices updated in the previous iteration.
const V_UPDATE: &str = "v_update";

#[derive(Debug, Clone, Copy, Default)]
pub struct SsspOptions {
    /// Use the edge weight column instead of unit weights; distances become
    /// float64 with infinity for unreached vertices.
    pub weighted: bool,
}

fn initial_vertices(graph: &GraphStore, source: i64, weighted: bool) -> Result<ColumnTable> {
    let ids = graph.vertex_ids();
    if ids.binary_search(&source).is_err() {
        return Err(Error::Domain(format!(
            "source vertex {source} is not in the graph"
        )));
    }
    let value: ColumnData = if weighted {
        ids.iter()
            .map(|&v| if v == source { 0.0 } else { f64::INFINITY })
            .collect::<Vec<f64>>()
            .into()
    } else {
        ids.iter()
            .map(|&v| if v == source { 0 } else { UNREACHED })
            .collect::<Vec<i64>>()
            .into()
    };
    ColumnTable::new(
        VERTEX_TABLE,
        vec![Column::new("id", ids.to_vec()), Column::new("value", value)],
    )
}

/// The compiled single-iteration plan with `sender` as the message source.
pub fn sssp_plan(weighted: bool, sender: &str, catalog: &Catalog) -> Result<Plan> {
    compile_iteration(VertexComputeKind::Sssp { weighted }, sender, catalog)
}

/// Unit-weight single-source shortest paths.
pub fn sssp(graph: &GraphStore, source: i64, cfg: &AlgoConfig) -> Result<AlgoOutput> {
    sssp_with(graph, source, SsspOptions::default(), cfg)
}

/// Iterates `v_update' = σ(new < v1.value) Γ_min(v2.value + w) (v_update ⋈ E ⋈ V)`
/// until no distance improves, applying each delta by update or replace.
pub fn sssp_with(
    graph: &GraphStore,
    source: i64,
    options: SsspOptions,
    cfg: &AlgoConfig,
) -> Result<AlgoOutput> {
    if options.weighted && !graph.has_weights() {
        return Err(Error::Domain(
            "weighted shortest paths need an edge weight column".into(),
        ));
    }
    let policy = &cfg.policy;
    let initial = initial_vertices(graph, source, options.weighted)?;
    let mut state = VertexState::new(initial.clone(), graph.partitions())?;
    let mut catalog = graph.catalog();
    let mut v_update =
        initial.take(&[initial.i64_column("id")?.binary_search(&source).unwrap() as u32]);
    let sender = if policy.incremental {
        V_UPDATE
    } else {
        VERTEX_TABLE
    };
    let mut iterations = Vec::new();
    let params = Params::default();

    for iteration in 1..=policy.max_iterations {
        let started = Instant::now();
        let mut record = IterationRecord::new(iteration);
        catalog.insert(VERTEX_TABLE, state.entry())?;
        catalog.register(V_UPDATE, v_update.clone(), TableRole::Vertex)?;
        let plan = sssp_plan(options.weighted, sender, &catalog)?;
        let result = execute(&plan, &catalog, &params, &cfg.exec)?;
        record.absorb(&result.report);
        let delta = result.table.with_name(V_UPDATE);
        record.updates = delta.row_count();
        if delta.is_empty() {
            record.wall = started.elapsed();
            iterations.push(record);
            break;
        }
        record.mode = ApplyMode::for_updates(delta.row_count(), policy.update_replace_threshold);
        match record.mode {
            ApplyMode::Update => record.bytes_written += delta.byte_size() as u64,
            ApplyMode::Replace => {}
        }
        if let Some(r) = state.apply(&delta, record.mode, &cfg.exec)? {
            record.absorb(&r);
        }
        v_update = delta;
        record.wall = started.elapsed();
        iterations.push(record);
    }
    let table = state
        .materialize()?
        .rename_columns(&["id", "d"])?
        .with_name("sssp");
    Ok(AlgoOutput { table, iterations })
}
