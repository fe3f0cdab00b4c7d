// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

use std::collections::BTreeMap;
use web_time::Instant;

use super::adjacency::Adjacency;
use super::{
    output_table, unknown_vertex, Context, Message, Outgoing, RuntimeOutput, SuperstepRecord,
    VertexProgram,
};
use crate::error::Result;
use crate::storage::GraphStore;

/// Single-threaded superstep interpreter with ordered maps for messages.
/// Slow and simple; the other engines are checked against it.
pub fn run_reference(
    graph: &GraphStore,
    program: &dyn VertexProgram,
    max_supersteps: u64,
) -> Result<RuntimeOutput> {
    let adj = Adjacency::build(graph, program.neighbors())?;
    let n = adj.len();
    let mut state: BTreeMap<i64, super::Value> = adj
        .ids
        .iter()
        .map(|&id| (id, program.initial_state(id, n)))
        .collect();
    let mut halted: BTreeMap<i64, bool> = adj.ids.iter().map(|&id| (id, false)).collect();
    let mut inbox: BTreeMap<i64, Vec<Message>> = BTreeMap::new();
    let mut records = Vec::new();

    for superstep in 0..max_supersteps {
        let active = halted.values().any(|h| !h) || !inbox.is_empty();
        if !active {
            break;
        }
        let started = Instant::now();
        let mut outbox: BTreeMap<i64, Vec<Message>> = BTreeMap::new();
        let mut record = SuperstepRecord {
            superstep,
            ..SuperstepRecord::default()
        };
        for (pos, &id) in adj.ids.iter().enumerate() {
            let mut messages = inbox.remove(&id).unwrap_or_default();
            if halted[&id] && messages.is_empty() {
                continue;
            }
            messages.sort();
            let row = adj.row(pos);
            let weights = adj.weights.as_ref().map(|w| &w[row.clone()]);
            let mut out = Vec::new();
            let mut ctx = Context::new(
                superstep,
                id,
                n,
                state[&id],
                &messages,
                &adj.target_ids[row.clone()],
                weights,
                &mut out,
            );
            program.compute(&mut ctx);
            let (value, halt) = (ctx.value, ctx.halted());
            state.insert(id, value);
            halted.insert(id, halt);
            record.active += 1;
            for o in out {
                let sends: Vec<(i64, super::Value)> = match o {
                    Outgoing::To(dst, v) => vec![(dst, v)],
                    Outgoing::AllNeighbors(v) => adj.target_ids[row.clone()]
                        .iter()
                        .map(|&t| (t, v))
                        .collect(),
                };
                for (dst, v) in sends {
                    if !state.contains_key(&dst) {
                        return Err(unknown_vertex(superstep, id, dst));
                    }
                    outbox.entry(dst).or_default().push(Message {
                        sender: id,
                        value: v,
                    });
                    record.messages += 1;
                }
            }
        }
        inbox = outbox;
        record.wall = started.elapsed();
        records.push(record);
    }
    let values: Vec<super::Value> = state.values().copied().collect();
    Ok(RuntimeOutput {
        table: output_table(program, state.keys().copied().collect(), &values)?,
        supersteps: records,
    })
}
