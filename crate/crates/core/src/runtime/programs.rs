// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

use super::{Context, Neighbors, Value, VertexProgram};
use crate::algos::UNREACHED;
use crate::plan::{PAGERANK_DAMPING, PAGERANK_TELEPORT};
use crate::storage::LogicalType;

/// Shortest paths from `source`; unit weights give int64 hop counts with
/// [`UNREACHED`], edge weights give float64 with infinity.
#[derive(Debug, Clone)]
pub struct SsspProgram {
    pub source: i64,
    pub weighted: bool,
}

impl VertexProgram for SsspProgram {
    fn name(&self) -> &str {
        "sssp"
    }

    fn value_type(&self) -> LogicalType {
        if self.weighted {
            LogicalType::Float64
        } else {
            LogicalType::Int64
        }
    }

    fn initial_state(&self, id: i64, _: usize) -> Value {
        match (self.weighted, id == self.source) {
            (false, true) => Value::Int(0),
            (false, false) => Value::Int(UNREACHED),
            (true, true) => Value::Float(0.0),
            (true, false) => Value::Float(f64::INFINITY),
        }
    }

    fn compute(&self, ctx: &mut Context<'_>) {
        let improved = if ctx.superstep() == 0 {
            ctx.id() == self.source
        } else {
            match ctx.messages().iter().map(|m| m.value).min() {
                Some(best) if best < ctx.value => {
                    ctx.value = best;
                    true
                }
                _ => false,
            }
        };
        if improved {
            match ctx.value {
                Value::Int(d) => ctx.send_to_neighbors(Value::Int(d.saturating_add(1))),
                Value::Float(d) => {
                    let sends: Vec<(i64, f64)> = match ctx.edge_weights() {
                        Some(w) => ctx
                            .out_edges()
                            .iter()
                            .copied()
                            .zip(w.iter().map(|w| d + w))
                            .collect(),
                        None => ctx.out_edges().iter().map(|&t| (t, d + 1.0)).collect(),
                    };
                    for (t, v) in sends {
                        ctx.send(t, Value::Float(v));
                    }
                }
            }
        }
        ctx.vote_to_halt();
    }
}

/// PageRank from the uniform distribution for a fixed number of updates;
/// runs `iterations + 1` supersteps.
#[derive(Debug, Clone)]
pub struct PageRankProgram {
    pub iterations: usize,
}

impl VertexProgram for PageRankProgram {
    fn name(&self) -> &str {
        "pagerank"
    }

    fn value_type(&self) -> LogicalType {
        LogicalType::Float64
    }

    fn initial_state(&self, _: i64, n: usize) -> Value {
        Value::Float(1.0 / n as f64)
    }

    fn compute(&self, ctx: &mut Context<'_>) {
        let n = ctx.num_vertices() as f64;
        if ctx.superstep() > 0 {
            let sum: f64 = ctx.messages().iter().map(|m| m.value.as_f64()).sum();
            ctx.value = Value::Float(PAGERANK_TELEPORT / n + PAGERANK_DAMPING * sum);
        }
        if (ctx.superstep() as usize) < self.iterations {
            let degree = ctx.out_edges().len();
            if degree > 0 {
                ctx.send_to_neighbors(Value::Float(ctx.value.as_f64() / degree as f64));
            }
        } else {
            ctx.vote_to_halt();
        }
    }
}

/// Minimum-label propagation over edges in both directions, giving weakly
/// connected components.
#[derive(Debug, Clone)]
pub struct CcProgram;

impl VertexProgram for CcProgram {
    fn name(&self) -> &str {
        "cc"
    }

    fn value_type(&self) -> LogicalType {
        LogicalType::Int64
    }

    fn neighbors(&self) -> Neighbors {
        Neighbors::Undirected
    }

    fn initial_state(&self, id: i64, _: usize) -> Value {
        Value::Int(id)
    }

    fn compute(&self, ctx: &mut Context<'_>) {
        let changed = match ctx.messages().iter().map(|m| m.value).min() {
            Some(best) if best < ctx.value => {
                ctx.value = best;
                true
            }
            _ => ctx.superstep() == 0,
        };
        if changed {
            ctx.send_to_neighbors(ctx.value);
        }
        ctx.vote_to_halt();
    }
}
