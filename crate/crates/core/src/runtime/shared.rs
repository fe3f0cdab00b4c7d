// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

use web_time::Instant;

use super::adjacency::Adjacency;
use super::{
    output_table, unknown_vertex, Context, Message, Outgoing, RuntimeOptions, RuntimeOutput,
    SuperstepRecord, Value, VertexProgram,
};
use crate::error::{Error, Result};
use crate::storage::GraphStore;

/// Messages grouped by destination position: `messages[offsets[v]..offsets[v + 1]]`.
#[derive(Debug, Default)]
struct Inbox {
    offsets: Vec<usize>,
    messages: Vec<Message>,
}

impl Inbox {
    fn empty(n: usize) -> Self {
        Inbox {
            offsets: vec![0; n + 1],
            messages: Vec::new(),
        }
    }

    fn of(&self, v: usize) -> &[Message] {
        &self.messages[self.offsets[v]..self.offsets[v + 1]]
    }
}

/// Double-buffered message store: workers fill per-worker outboxes while
/// reading the inbox; the barrier turns the outboxes into the next inbox.
#[derive(Debug)]
struct MessageStore {
    inbox: Inbox,
    spare: Inbox,
}

impl MessageStore {
    fn new(n: usize) -> Self {
        MessageStore {
            inbox: Inbox::empty(n),
            spare: Inbox::empty(n),
        }
    }

    fn is_empty(&self) -> bool {
        self.inbox.messages.is_empty()
    }

    /// Counting sort by destination. Outboxes come from workers in vertex
    /// order, so each destination sees senders in ascending id order; runs
    /// where one sender sent several values are sorted afterwards.
    fn swap_in(&mut self, outboxes: &[Vec<(u32, Message)>]) {
        let next = &mut self.spare;
        next.offsets.iter_mut().for_each(|o| *o = 0);
        let total: usize = outboxes.iter().map(Vec::len).sum();
        for ob in outboxes {
            for (dst, _) in ob {
                next.offsets[*dst as usize + 1] += 1;
            }
        }
        for i in 1..next.offsets.len() {
            next.offsets[i] += next.offsets[i - 1];
        }
        next.messages.clear();
        next.messages.resize(
            total,
            Message {
                sender: 0,
                value: Value::Int(0),
            },
        );
        let mut cursor = next.offsets.clone();
        for ob in outboxes {
            for &(dst, m) in ob {
                next.messages[cursor[dst as usize]] = m;
                cursor[dst as usize] += 1;
            }
        }
        for v in 0..next.offsets.len() - 1 {
            let group = &mut next.messages[next.offsets[v]..next.offsets[v + 1]];
            if group.windows(2).any(|w| w[0] > w[1]) {
                group.sort();
            }
        }
        std::mem::swap(&mut self.inbox, &mut self.spare);
    }
}

/// Bytes the shared-memory engine needs for `graph`: adjacency, states,
/// and both message buffers at one message per edge.
pub fn estimate_shared_bytes(graph: &GraphStore) -> u64 {
    let n = graph.n() as u64;
    let e = graph.edge_count() as u64 * 2;
    let adjacency = n * 16 + e * if graph.has_weights() { 20 } else { 12 };
    let states = n * 18;
    let messages = 2 * e * (std::mem::size_of::<Message>() as u64 + 8);
    adjacency + states + messages
}

fn available_memory() -> Option<u64> {
    let info = std::fs::read_to_string("/proc/meminfo").ok()?;
    let line = info.lines().find(|l| l.starts_with("MemAvailable:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

/// Runs `program` with the whole graph, vertex states and messages held in
/// memory; supersteps are separated by a barrier and write nothing.
pub fn run_shared_memory(
    graph: &GraphStore,
    program: &dyn VertexProgram,
    opts: &RuntimeOptions,
) -> Result<RuntimeOutput> {
    let budget = opts
        .memory_budget
        .or_else(|| available_memory().map(|m| m / 4 * 3))
        .unwrap_or(u64::MAX);
    let need = estimate_shared_bytes(graph);
    if need > budget {
        return Err(Error::Resource(format!(
            "shared-memory mode needs about {need} bytes but the budget is {budget}; use the table-UDF mode"
        )));
    }
    let adj = Adjacency::build(graph, program.neighbors())?;
    let n = adj.len();
    let workers = opts.workers.clamp(1, n.max(1));
    let mut states: Vec<Value> = adj
        .ids
        .iter()
        .map(|&id| program.initial_state(id, n))
        .collect();
    let mut halted = vec![false; n];
    let mut store = MessageStore::new(n);
    let chunk = n.div_ceil(workers).max(1);
    let mut outboxes: Vec<Vec<(u32, Message)>> = (0..workers).map(|_| Vec::new()).collect();
    let mut records = Vec::new();

    for superstep in 0..opts.max_supersteps {
        if halted.iter().all(|&h| h) && store.is_empty() {
            break;
        }
        let started = Instant::now();
        let inbox = &store.inbox;
        let adj = &adj;
        let results: Vec<Result<usize>> = std::thread::scope(|s| {
            let handles: Vec<_> = states
                .chunks_mut(chunk)
                .zip(halted.chunks_mut(chunk))
                .zip(outboxes.iter_mut())
                .enumerate()
                .map(|(w, ((st, ht), ob))| {
                    let base = w * chunk;
                    let mut work = move || worker(program, adj, inbox, superstep, base, st, ht, ob);
                    if workers == 1 {
                        Ok(work())
                    } else {
                        Err(s.spawn(work))
                    }
                })
                .collect();
            handles
                .into_iter()
                .map(|h| match h {
                    Ok(r) => r,
                    Err(h) => h.join().expect("worker panicked"),
                })
                .collect()
        });
        let mut active = 0;
        for r in results {
            active += r?;
        }
        let sent: usize = outboxes.iter().map(Vec::len).sum();
        store.swap_in(&outboxes);
        outboxes.iter_mut().for_each(Vec::clear);
        records.push(SuperstepRecord {
            superstep,
            active,
            messages: sent,
            wall: started.elapsed(),
            bytes_read: 0,
            bytes_written: 0,
        });
    }
    Ok(RuntimeOutput {
        table: output_table(program, adj.ids.clone(), &states)?,
        supersteps: records,
    })
}

/// Runs one superstep for vertices `base..base + states.len()`.
#[allow(clippy::too_many_arguments)]
fn worker(
    program: &dyn VertexProgram,
    adj: &Adjacency,
    inbox: &Inbox,
    superstep: u64,
    base: usize,
    states: &mut [Value],
    halted: &mut [bool],
    outbox: &mut Vec<(u32, Message)>,
) -> Result<usize> {
    let n = adj.len();
    let mut out = Vec::new();
    let mut active = 0;
    for (i, (state, halt)) in states.iter_mut().zip(halted.iter_mut()).enumerate() {
        let v = base + i;
        let messages = inbox.of(v);
        if *halt && messages.is_empty() {
            continue;
        }
        active += 1;
        let row = adj.row(v);
        let weights = adj.weights.as_ref().map(|w| &w[row.clone()]);
        let id = adj.ids[v];
        out.clear();
        let mut ctx = Context::new(
            superstep,
            id,
            n,
            *state,
            messages,
            &adj.target_ids[row.clone()],
            weights,
            &mut out,
        );
        program.compute(&mut ctx);
        *state = ctx.value;
        *halt = ctx.halted();
        for o in &out {
            match *o {
                Outgoing::AllNeighbors(value) => {
                    outbox.extend(
                        adj.targets[row.clone()]
                            .iter()
                            .map(|&t| (t, Message { sender: id, value })),
                    );
                }
                Outgoing::To(dst, value) => {
                    let t = adj
                        .position(dst)
                        .ok_or_else(|| unknown_vertex(superstep, id, dst))?;
                    outbox.push((t, Message { sender: id, value }));
                }
            }
        }
    }
    Ok(active)
}
