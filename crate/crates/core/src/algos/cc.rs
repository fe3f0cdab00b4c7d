// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

use web_time::Instant;

use rustc_hash::FxHashSet;

use super::{
    compile_iteration_with, AlgoConfig, AlgoOutput, ApplyMode, IterationRecord, VertexState,
};
use crate::error::Result;
use crate::exec::execute;
use crate::expr::Params;
use crate::plan::VertexComputeKind;
use crate::storage::{
    Column, ColumnTable, GraphStore, LoadOptions, Scalar, TableRole, VERTEX_TABLE,
};

const V_UPDATE: &str = "v_update";

/// Hash-min connected components: every vertex starts labelled with its
/// own id and repeatedly takes the smallest label among its neighbours.
/// Labels converge to the minimum id of each weakly connected component.
///
/// On directed graphs labels flow along edges on odd iterations and against
/// them on even ones when alternation is on; with alternation off the edges
/// are symmetrized up front.
pub fn connected_components(graph: &GraphStore, cfg: &AlgoConfig) -> Result<AlgoOutput> {
    let policy = &cfg.policy;
    let alternate = graph.is_directed() && policy.cc_alternate_direction;
    let symmetric;
    let graph = if graph.is_directed() && !alternate {
        let opts = LoadOptions::directed(false).with_partitions(graph.partitions());
        symmetric =
            GraphStore::from_edges_and_vertices(&graph.edge_pairs(), graph.vertex_ids(), &opts)?;
        &symmetric
    } else {
        graph
    };

    let ids = graph.vertex_ids().to_vec();
    let initial = ColumnTable::new(
        VERTEX_TABLE,
        vec![Column::new("id", ids.clone()), Column::new("value", ids)],
    )?;
    let mut state = VertexState::new(initial.clone(), graph.partitions())?;
    let mut catalog = graph.catalog();
    let params = Params::default();
    let mut iterations = Vec::new();
    // Deltas of the last two iterations: a vertex relabelled while flowing
    // one way must still send its label the other way. Every initial label
    // counts as new.
    let mut recent: [Option<ColumnTable>; 2] = [Some(initial), None];
    let mut empty_streak = 0;

    for iteration in 1..=policy.max_iterations {
        let started = Instant::now();
        let mut record = IterationRecord::new(iteration);
        catalog.insert(VERTEX_TABLE, state.entry())?;
        let full = !policy.incremental || iteration <= policy.cc_full_update_iters;
        let sender = if full {
            VERTEX_TABLE
        } else {
            catalog.register(V_UPDATE, senders(&state, &recent)?, TableRole::Vertex)?;
            V_UPDATE
        };
        let reversed = alternate && iteration % 2 == 0;
        let plan = compile_iteration_with(VertexComputeKind::Cc, sender, reversed, &catalog)?;
        let result = execute(&plan, &catalog, &params, &cfg.exec)?;
        record.absorb(&result.report);
        let delta = result.table.with_name(V_UPDATE);
        record.updates = delta.row_count();
        if delta.is_empty() {
            empty_streak += 1;
        } else {
            empty_streak = 0;
            record.mode =
                ApplyMode::for_updates(delta.row_count(), policy.update_replace_threshold);
            if record.mode == ApplyMode::Update {
                record.bytes_written += delta.byte_size() as u64;
            }
            if let Some(r) = state.apply(&delta, record.mode, &cfg.exec)? {
                record.absorb(&r);
            }
        }
        recent = [Some(delta), recent[0].take()];
        record.wall = started.elapsed();
        iterations.push(record);
        // An empty pass in one direction may still leave work for the other,
        // and the first full passes always run.
        let needed = if alternate { 2 } else { 1 };
        if empty_streak >= needed && (!full || iteration >= policy.cc_full_update_iters) {
            break;
        }
    }
    let table = state
        .materialize()?
        .rename_columns(&["id", "component"])?
        .with_name("cc");
    Ok(AlgoOutput { table, iterations })
}

/// Current labels of every vertex changed in the last two iterations.
fn senders(state: &VertexState, recent: &[Option<ColumnTable>; 2]) -> Result<ColumnTable> {
    let mut ids: Vec<i64> = Vec::new();
    let mut seen = FxHashSet::default();
    for delta in recent.iter().flatten() {
        for &id in delta.i64_column("id")? {
            if seen.insert(id) {
                ids.push(id);
            }
        }
    }
    ids.sort_unstable();
    let values: Vec<i64> = ids
        .iter()
        .map(|&id| match state.value(id) {
            Some(Scalar::Int(v)) => v,
            _ => id,
        })
        .collect();
    ColumnTable::new(
        V_UPDATE,
        vec![Column::new("id", ids), Column::new("value", values)],
    )
}
