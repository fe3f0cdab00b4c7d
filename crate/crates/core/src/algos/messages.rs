// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

//! Direct execution of unrewritten vertex-centric plans: the message table
//! is built by walking out-edges of every sender, then registered so the
//! plan's message scan can read it.

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::exec::{execute, ExecOptions, ExecResult};
use crate::expr::Params;
use crate::plan::{VertexComputeKind, MESSAGE_TABLE};
use crate::storage::{Catalog, Column, ColumnData, ColumnTable, Scalar, TableRole};

/// Messages `(dst, value)` sent by every row of `sender` (id, value) along
/// its out-edges in `edge`, in edge order per sender.
pub fn materialize_messages(
    kind: &VertexComputeKind,
    sender: &ColumnTable,
    edge: &ColumnTable,
) -> Result<ColumnTable> {
    if let VertexComputeKind::Opaque(name) = kind {
        return Err(Error::LoweringUnsupported(format!(
            "program {name} has no relational message"
        )));
    }
    let weighted = matches!(kind, VertexComputeKind::Sssp { weighted: true });
    let from = edge.i64_column("from_node")?;
    let to = edge.i64_column("to_node")?;
    let weights = if weighted {
        Some(edge.f64_column("weight")?)
    } else {
        None
    };
    let mut out_edges: FxHashMap<i64, Vec<usize>> = FxHashMap::default();
    for (i, &f) in from.iter().enumerate() {
        out_edges.entry(f).or_default().push(i);
    }

    let ids = sender.i64_column("id")?;
    let values = &sender.column("value")?.data;
    let mut dst = Vec::new();
    let mut out = Vec::new();
    for (r, id) in ids.iter().enumerate() {
        let Some(edges) = out_edges.get(id) else {
            continue;
        };
        let value = values.scalar(r);
        for &e in edges {
            let message = match (&kind, &value) {
                (_, Scalar::Null) => Scalar::Null,
                (VertexComputeKind::Sssp { weighted: false }, Scalar::Int(d)) => {
                    Scalar::Int(d.saturating_add(1))
                }
                (VertexComputeKind::Sssp { weighted: true }, Scalar::Float(d)) => {
                    Scalar::Float(d + weights.expect("weighted")[e])
                }
                (VertexComputeKind::Sssp { .. }, other) => {
                    return Err(Error::Domain(format!(
                        "distance {other:?} has the wrong type"
                    )))
                }
                _ => value.clone(),
            };
            dst.push(to[e]);
            out.push(message);
        }
    }
    let ty = values.logical_type();
    ColumnTable::new(
        MESSAGE_TABLE,
        vec![
            Column::new("dst", dst),
            Column::new("value", ColumnData::from_scalars(ty, &out)?),
        ],
    )
}

/// Executes a plan that still scans the message table, with `messages`
/// registered under that name.
pub fn run_vertex_centric(
    plan: &crate::plan::Plan,
    catalog: &Catalog,
    messages: ColumnTable,
    params: &Params,
    opts: &ExecOptions,
) -> Result<ExecResult> {
    let mut catalog = catalog.clone();
    catalog.register(MESSAGE_TABLE, messages, TableRole::Message)?;
    execute(plan, &catalog, params, opts)
}
