// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

use super::logical::{
    join, scan, AggExpr, AggFunc, JoinKind, Plan, VertexComputeKind, VertexComputeNode,
};
use crate::error::{Error, Result};
use crate::expr::{col, lit, param, Expr};
use crate::storage::{TableRole, EDGE_TABLE, VERTEX_TABLE};

pub const MESSAGE_TABLE: &str = "message";
/// Per-iteration PageRank sender table: (id, value = rank / out-degree).
pub const OUTBOUND_TABLE: &str = "v_outbound";

pub const PAGERANK_DAMPING: f64 = 0.85;
pub const PAGERANK_TELEPORT: f64 = 0.15;

/// Name of the aggregate produced by lowering.
const NEW_VALUE: &str = "new_value";
const RANK_SUM: &str = "rank_sum";

/// Message sent from `v2` along edge `e` for each built-in kind.
pub fn send_expr(kind: &VertexComputeKind) -> Expr {
    match kind {
        VertexComputeKind::Sssp { weighted: false } => col("v2.value").add(lit(1i64)),
        VertexComputeKind::Sssp { weighted: true } => col("v2.value").add(col("e.weight")),
        VertexComputeKind::Cc | VertexComputeKind::PageRank | VertexComputeKind::Opaque(_) => {
            col("v2.value")
        }
    }
}

/// The Pregel-style plan: messages M joined with receiving vertices V feed
/// the vertex compute, which yields V′ and, through E, the next M′.
pub fn build_vertex_centric_plan(kind: VertexComputeKind) -> Plan {
    let sender = match kind {
        VertexComputeKind::PageRank => OUTBOUND_TABLE,
        _ => VERTEX_TABLE,
    };
    Plan::VertexCompute(VertexComputeNode {
        send: send_expr(&kind),
        input: Box::new(join(
            scan(MESSAGE_TABLE, "m", TableRole::Message),
            scan(VERTEX_TABLE, "v1", TableRole::Vertex),
            &[("m.dst", "v1.id")],
        )),
        vertex_id: "v1.id".into(),
        vertex_value: "v1.value".into(),
        message: col("m.value"),
        emit_messages: Some(Box::new(scan(EDGE_TABLE, "e", TableRole::Edge))),
        sender_table: sender.into(),
        mutates_structure: false,
        kind,
    })
}

/// Sets the table that sends messages (`v2`) in every vertex-compute node.
pub fn with_sender_table(plan: &Plan, table: &str) -> Plan {
    map_vertex_computes(plan, &mut |v| {
        Ok(Plan::VertexCompute(VertexComputeNode {
            sender_table: table.to_string(),
            ..v.clone()
        }))
    })
    .expect("infallible")
}

/// Swaps the roles of `from_node` and `to_node` for edge alias `e`, so
/// messages flow against edge direction.
pub fn reverse_edges(plan: &Plan, e: &str) -> Plan {
    let from = format!("{e}.from_node");
    let to = format!("{e}.to_node");
    substitute_columns(plan, &|c| {
        if c == from {
            Some(col(&to))
        } else if c == to {
            Some(col(&from))
        } else {
            None
        }
    })
}

/// Replaces column references through `f` in every expression and join key
/// of `plan`. Join keys only accept column-to-column substitutions.
pub fn substitute_columns(plan: &Plan, f: &impl Fn(&str) -> Option<Expr>) -> Plan {
    let rename = |name: &str| match f(name) {
        Some(Expr::Column(c)) => c,
        _ => name.to_string(),
    };
    let node = match plan {
        Plan::Scan(s) => Plan::Scan(super::logical::ScanNode {
            predicate: s.predicate.as_ref().map(|p| p.map_columns(f)),
            ..s.clone()
        }),
        Plan::Filter { input, predicate } => Plan::Filter {
            input: input.clone(),
            predicate: predicate.map_columns(f),
        },
        Plan::Project { input, exprs } => Plan::Project {
            input: input.clone(),
            exprs: exprs
                .iter()
                .map(|(e, n)| (e.map_columns(f), n.clone()))
                .collect(),
        },
        Plan::Join(j) => Plan::Join(super::logical::JoinNode {
            on: j.on.iter().map(|(l, r)| (rename(l), rename(r))).collect(),
            ..j.clone()
        }),
        Plan::GroupByAgg(a) => Plan::GroupByAgg(super::logical::AggNode {
            keys: a.keys.iter().map(|k| rename(k)).collect(),
            aggs: a
                .aggs
                .iter()
                .map(|g| AggExpr {
                    arg: g.arg.as_ref().map(|e| e.map_columns(f)),
                    ..g.clone()
                })
                .collect(),
            having: a.having.as_ref().map(|h| h.map_columns(f)),
            ..a.clone()
        }),
        Plan::VertexCompute(v) => Plan::VertexCompute(VertexComputeNode {
            vertex_id: rename(&v.vertex_id),
            vertex_value: rename(&v.vertex_value),
            message: v.message.map_columns(f),
            ..v.clone()
        }),
        Plan::UpdateSink {
            input,
            table,
            key,
            value,
        } => Plan::UpdateSink {
            input: input.clone(),
            table: table.clone(),
            key: rename(key),
            value: rename(value),
        },
        other => other.clone(),
    };
    node.map_children(&mut |c| Ok(substitute_columns(c, f)))
        .expect("substitution is infallible")
}

fn message_scan_alias(plan: &Plan) -> Option<String> {
    plan.scans()
        .into_iter()
        .find(|s| s.role == TableRole::Message)
        .map(|s| s.alias.clone())
}

/// Applies `f` to every vertex-compute node, bottom-up.
fn map_vertex_computes(
    plan: &Plan,
    f: &mut impl FnMut(&VertexComputeNode) -> Result<Plan>,
) -> Result<Plan> {
    let plan = plan.map_children(&mut |c| map_vertex_computes(c, f))?;
    match &plan {
        Plan::VertexCompute(v) => f(v),
        _ => Ok(plan),
    }
}

/// Pushes the vertex compute through the message table: M becomes
/// V2 ⋈ E with `m.dst = e.to_node` and `m.value = send`, so the plan reads
/// only V and E and no longer emits M′.
pub fn eliminate_message_table(plan: &Plan) -> Result<Plan> {
    map_vertex_computes(plan, &mut |v| {
        let Some(alias) = message_scan_alias(&v.input) else {
            return Ok(Plan::VertexCompute(v.clone()));
        };
        if v.mutates_structure {
            return Err(Error::RewriteInapplicable(format!(
                "vertex program {} changes the graph structure",
                v.kind.name()
            )));
        }
        let edges = v.emit_messages.as_deref().ok_or_else(|| {
            Error::RewriteInapplicable("message table has no edge scan to derive it from".into())
        })?;
        let e = edges
            .scans()
            .first()
            .map(|s| s.alias.clone())
            .ok_or_else(|| Error::RewriteInapplicable("edge plan has no scan".into()))?;
        let dst = format!("{alias}.dst");
        let value = format!("{alias}.value");
        let to = format!("{e}.to_node");
        let send = v.send.clone();
        let subst = |c: &str| -> Option<Expr> {
            if c == dst {
                Some(col(&to))
            } else if c == value {
                Some(send.clone())
            } else {
                None
            }
        };
        let senders = join(
            scan(&v.sender_table, "v2", TableRole::Vertex),
            edges.clone(),
            &[("v2.id", &format!("{e}.from_node"))],
        );
        let input = replace_message_scan(&v.input, &senders)?;
        Ok(Plan::VertexCompute(VertexComputeNode {
            input: Box::new(substitute_columns(&input, &subst)),
            message: v.message.map_columns(&subst),
            emit_messages: None,
            ..v.clone()
        }))
    })
}

fn replace_message_scan(plan: &Plan, with: &Plan) -> Result<Plan> {
    match plan {
        Plan::Scan(s) if s.role == TableRole::Message => Ok(with.clone()),
        _ => plan.map_children(&mut |c| replace_message_scan(c, with)),
    }
}

/// Replaces vertex-compute nodes of built-in kinds with relational
/// operators producing V′ = (id, value).
pub fn lower_vertex_compute(plan: &Plan) -> Result<Plan> {
    map_vertex_computes(plan, &mut |v| {
        if let VertexComputeKind::Opaque(name) = &v.kind {
            return Err(Error::LoweringUnsupported(format!(
                "vertex program {name} has no relational form; run it in the vertex runtime"
            )));
        }
        if v.emit_messages.is_some() || message_scan_alias(&v.input).is_some() {
            return Err(Error::RewriteInapplicable(
                "eliminate the message table before lowering".into(),
            ));
        }
        let input = (*v.input).clone();
        Ok(match v.kind {
            VertexComputeKind::PageRank => {
                let rank = lit(PAGERANK_TELEPORT)
                    .div(param("n"))
                    .add(lit(PAGERANK_DAMPING).mul(col(RANK_SUM)));
                input
                    .aggregate(
                        &[&v.vertex_id],
                        vec![AggExpr::new(AggFunc::Sum, v.message.clone(), RANK_SUM)],
                        None,
                    )
                    .project(vec![(col(&v.vertex_id), "id"), (rank, "value")])
            }
            _ => input
                .aggregate(
                    &[&v.vertex_id, &v.vertex_value],
                    vec![AggExpr::new(AggFunc::Min, v.message.clone(), NEW_VALUE)],
                    Some(col(NEW_VALUE).lt(col(&v.vertex_value))),
                )
                .project(vec![(col(&v.vertex_id), "id"), (col(NEW_VALUE), "value")]),
        })
    })
}

/// Every column name referenced anywhere in `plan`.
fn referenced_columns(plan: &Plan, out: &mut Vec<String>) {
    let push_expr =
        |e: &Expr, out: &mut Vec<String>| out.extend(e.columns().into_iter().map(String::from));
    match plan {
        Plan::Scan(s) => {
            if let Some(p) = &s.predicate {
                push_expr(p, out);
            }
        }
        Plan::Filter { predicate, .. } => push_expr(predicate, out),
        Plan::Project { exprs, .. } => exprs.iter().for_each(|(e, _)| push_expr(e, out)),
        Plan::Join(j) => {
            j.on.iter()
                .for_each(|(l, r)| out.extend([l.clone(), r.clone()]))
        }
        Plan::GroupByAgg(a) => {
            out.extend(a.keys.iter().cloned());
            for g in &a.aggs {
                if let Some(e) = &g.arg {
                    push_expr(e, out);
                }
            }
            if let Some(h) = &a.having {
                push_expr(h, out);
            }
        }
        Plan::VertexCompute(v) => {
            out.extend([v.vertex_id.clone(), v.vertex_value.clone()]);
            push_expr(&v.message, out);
            push_expr(&v.send, out);
        }
        Plan::UpdateSink { key, value, .. } => out.extend([key.clone(), value.clone()]),
        Plan::Union(_) | Plan::ReplaceSink { .. } => {}
    }
    for c in plan.children() {
        referenced_columns(c, out);
    }
}

/// A removable join: `side` is a bare vertex scan joined on its id to an
/// edge endpoint of the other side.
struct Redundant {
    vertex_alias: String,
    endpoint: String,
    keep_left: bool,
}

fn redundant_join(plan: &Plan) -> Option<Redundant> {
    let Plan::Join(j) = plan else { return None };
    if j.kind != JoinKind::Inner || j.on.len() != 1 {
        return None;
    }
    let (l, r) = &j.on[0];
    let check = |vertex_side: &Plan, vkey: &str, other: &Plan, okey: &str| -> Option<String> {
        let Plan::Scan(s) = vertex_side else {
            return None;
        };
        if s.role != TableRole::Vertex || s.predicate.is_some() || vkey != format!("{}.id", s.alias)
        {
            return None;
        }
        let (alias, column) = okey.split_once('.')?;
        let endpoint = matches!(column, "from_node" | "to_node");
        let edge = other
            .scans()
            .iter()
            .any(|e| e.alias == alias && e.role == TableRole::Edge && e.predicate.is_none());
        (endpoint && edge).then(|| s.alias.clone())
    };
    if let Some(a) = check(&j.right, r, &j.left, l) {
        return Some(Redundant {
            vertex_alias: a,
            endpoint: l.clone(),
            keep_left: true,
        });
    }
    check(&j.left, l, &j.right, r).map(|a| Redundant {
        vertex_alias: a,
        endpoint: r.clone(),
        keep_left: false,
    })
}

/// Removes one redundant join reachable from `plan`, if any.
fn eliminate_one(root: &Plan) -> Option<Plan> {
    let mut all = Vec::new();
    referenced_columns(root, &mut all);
    let mut found: Option<(String, String)> = None;
    let rewritten = remove_join(root, &all, &mut found).ok()?;
    let (alias, endpoint) = found?;
    let id = format!("{alias}.id");
    Some(substitute_columns(&rewritten, &|c| {
        (c == id).then(|| col(&endpoint))
    }))
}

fn remove_join(plan: &Plan, refs: &[String], found: &mut Option<(String, String)>) -> Result<Plan> {
    if found.is_none() {
        if let (Some(r), Plan::Join(j)) = (redundant_join(plan), plan) {
            let prefix = format!("{}.", r.vertex_alias);
            let id = format!("{}id", prefix);
            let join_key = j.on[0].clone();
            let mut others = refs
                .iter()
                .filter(|c| **c != join_key.0 && **c != join_key.1);
            if !others.any(|c| c.starts_with(&prefix) && *c != id) {
                *found = Some((r.vertex_alias, r.endpoint));
                return Ok(if r.keep_left {
                    (*j.left).clone()
                } else {
                    (*j.right).clone()
                });
            }
        }
    }
    plan.map_children(&mut |c| remove_join(c, refs, found))
}

/// Drops joins with a vertex table whose only use is its id, when the other
/// key is an edge endpoint and therefore always has a match.
pub fn eliminate_redundant_join(plan: &Plan) -> Plan {
    let mut current = plan.clone();
    while let Some(next) = eliminate_one(&current) {
        current = next;
    }
    current
}
