// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

use super::batch::Batch;
use super::executor::{execute, ExecOptions};
use crate::error::{Error, Result};
use crate::expr::{col, Params};
use crate::plan::logical::vertex_compute_schema;
use crate::plan::{
    scan, Plan, VertexComputeKind, VertexComputeNode, PAGERANK_DAMPING, PAGERANK_TELEPORT,
};
use crate::storage::{
    Catalog, Column, ColumnData, ColumnTable, ColumnValues, LogicalType, Scalar, TableRole,
};

/// Name under which V′ is visible while emitting M′.
const VPRIME_TABLE: &str = "__vprime";

/// Groups `input` by receiving vertex and applies the kind's update. The
/// result V′ holds one row per updated vertex, ordered by id.
pub fn compute(v: &VertexComputeNode, input: &Batch, params: &Params) -> Result<ColumnTable> {
    let schema = input.schema.as_ref();
    let id_idx = schema.resolve(&v.vertex_id)?;
    let value_idx = schema.resolve(&v.vertex_value)?;
    let messages = v.message.eval(input, params)?;
    let out_schema = vertex_compute_schema(v, schema);
    let prefix = v.vertex_id.rsplit_once('.').map_or("", |(p, _)| p);
    let sources: Vec<usize> = out_schema
        .fields
        .iter()
        .map(|f| {
            let qualified = if prefix.is_empty() {
                f.name.clone()
            } else {
                format!("{prefix}.{}", f.name)
            };
            schema
                .fields
                .iter()
                .position(|g| g.name == qualified)
                .expect("V' column comes from the input")
        })
        .collect();
    let out_value = sources
        .iter()
        .position(|&s| s == value_idx)
        .expect("value column kept");

    let ids = input.column(id_idx);
    let mut order: Vec<u32> = (0..input.len() as u32).collect();
    order.sort_by_key(|&r| ids.scalar(r as usize));

    let mut rows: Vec<u32> = Vec::new();
    let mut values: Vec<Scalar> = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let id = ids.scalar(order[start] as usize);
        let mut end = start + 1;
        while end < order.len() && ids.scalar(order[end] as usize) == id {
            end += 1;
        }
        let group = &order[start..end];
        let current = input.column(value_idx).scalar(group[0] as usize);
        let msgs = group
            .iter()
            .map(|&r| messages.scalar(r as usize))
            .filter(|m| !m.is_null());
        let update = match &v.kind {
            VertexComputeKind::Sssp { .. } | VertexComputeKind::Cc => {
                msgs.min().filter(|m| current.is_null() || *m < current)
            }
            VertexComputeKind::PageRank => {
                let n = params
                    .get("n")
                    .and_then(Scalar::as_f64)
                    .ok_or_else(|| Error::plan("pagerank compute needs parameter :n"))?;
                let sum: f64 = msgs.filter_map(|m| m.as_f64()).sum();
                Some(Scalar::Float(
                    PAGERANK_TELEPORT / n + PAGERANK_DAMPING * sum,
                ))
            }
            VertexComputeKind::Opaque(name) => {
                return Err(Error::LoweringUnsupported(format!(
                    "vertex program {name} has no relational form"
                )))
            }
        };
        if let Some(value) = update {
            rows.push(group[0]);
            values.push(value);
        }
        start = end;
    }

    let columns = out_schema
        .fields
        .iter()
        .zip(&sources)
        .enumerate()
        .map(|(i, (f, &src))| {
            let data = if i == out_value {
                let mut vals = ColumnValues::with_capacity(f.ty, values.len());
                for s in &values {
                    vals.push_scalar(&cast(s, f.ty))?;
                }
                let validity = values.iter().any(Scalar::is_null).then(|| {
                    crate::storage::Bitmap::from_bools(values.iter().map(|s| !s.is_null()))
                });
                ColumnData::new(vals, validity)
            } else {
                input.column(src).take(&rows)
            };
            Ok(Column::new(f.name.clone(), data))
        })
        .collect::<Result<Vec<_>>>()?;
    ColumnTable::new("V'", columns)
}

fn cast(s: &Scalar, ty: LogicalType) -> Scalar {
    match (s, ty) {
        (Scalar::Int(i), LogicalType::Float64) => Scalar::Float(*i as f64),
        (Scalar::Float(f), LogicalType::Int64) => Scalar::Int(*f as i64),
        _ => s.clone(),
    }
}

/// M′ = (dst, value) for every out-edge of an updated vertex, computed by
/// joining V′ with the edge plan.
pub fn emit_messages(
    v: &VertexComputeNode,
    vprime: &ColumnTable,
    edges: &Plan,
    catalog: &Catalog,
    params: &Params,
) -> Result<ColumnTable> {
    let alias = edges
        .scans()
        .first()
        .map(|s| s.alias.clone())
        .ok_or_else(|| Error::plan("message emission needs an edge scan"))?;
    let mut temp = catalog.clone();
    temp.register(VPRIME_TABLE, vprime.clone(), TableRole::Vertex)?;
    let from = format!("{alias}.from_node");
    let to = format!("{alias}.to_node");
    let plan = crate::plan::join(
        scan(VPRIME_TABLE, "v2", TableRole::Vertex),
        edges.clone(),
        &[("v2.id", &from)],
    )
    .project(vec![(col(&to), "dst"), (v.send.clone(), "value")]);
    let opts = ExecOptions {
        sip: false,
        ..ExecOptions::default()
    };
    Ok(execute(&plan, &temp, params, &opts)?.table.with_name("M'"))
}
