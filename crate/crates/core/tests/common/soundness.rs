// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

//! Checks that every rewrite stage of the built-in programs computes the
//! same V′ as plain message passing over a random graph.

use std::collections::BTreeMap;

use colgraph::algos::messages::{materialize_messages, run_vertex_centric};
use colgraph::algos::{VertexState, UNREACHED};
use colgraph::exec::{execute, ExecOptions};
use colgraph::expr::Params;
use colgraph::plan::*;
use colgraph::storage::{
    Catalog, Column, ColumnTable, GraphStore, LoadOptions, Scalar, TableRole, EDGE_TABLE,
    VERTEX_TABLE,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SSSP: VertexComputeKind = VertexComputeKind::Sssp { weighted: false };

pub fn kinds() -> [VertexComputeKind; 3] {
    [SSSP, VertexComputeKind::Cc, VertexComputeKind::PageRank]
}

/// All rewrite stages of a built-in program, before physical choice.
pub fn stages(kind: VertexComputeKind) -> Vec<Plan> {
    let p0 = build_vertex_centric_plan(kind);
    let p1 = eliminate_message_table(&p0).unwrap();
    let p2 = lower_vertex_compute(&p1).unwrap();
    let p3 = eliminate_redundant_join(&p2);
    vec![p0, p1, p2, p3]
}

/// Random graph with vertex state for each program and the sender table.
struct Case {
    catalog: Catalog,
    params: Params,
    edges: Vec<(i64, i64)>,
    values: BTreeMap<i64, Scalar>,
    senders: BTreeMap<i64, Scalar>,
}

fn case(kind: &VertexComputeKind, n: usize, p: f64, seed: u64, partitions: usize) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = colgraph::gen::gnp_edges(n, p, true, seed);
    let ids: Vec<i64> = (0..n as i64).collect();
    let g = GraphStore::from_edges_and_vertices(
        &edges,
        &ids,
        &LoadOptions::directed(true).with_partitions(partitions),
    )
    .unwrap();
    let values: Vec<Scalar> = ids
        .iter()
        .map(|_| match kind {
            VertexComputeKind::PageRank => Scalar::Float(rng.gen_range(0.0..1.0)),
            _ if rng.gen_bool(0.3) => Scalar::Int(UNREACHED),
            _ => Scalar::Int(rng.gen_range(0..n as i64)),
        })
        .collect();
    let vertex = table(VERTEX_TABLE, &ids, &values);
    let mut catalog = g.catalog();
    catalog
        .insert(
            VERTEX_TABLE,
            VertexState::new(vertex.clone(), partitions)
                .unwrap()
                .entry(),
        )
        .unwrap();
    let mut params = Params::default();
    params.insert("n".into(), Scalar::Int(n as i64));
    let senders: BTreeMap<i64, Scalar> = match kind {
        VertexComputeKind::PageRank => {
            let mut out = BTreeMap::new();
            for &v in &ids {
                if rng.gen_bool(0.7) {
                    out.insert(v, Scalar::Float(rng.gen_range(0.0..0.5)));
                }
            }
            out
        }
        _ => ids.iter().copied().zip(values.iter().cloned()).collect(),
    };
    if matches!(kind, VertexComputeKind::PageRank) {
        let (sid, sval): (Vec<i64>, Vec<Scalar>) = senders.clone().into_iter().unzip();
        catalog
            .register(
                OUTBOUND_TABLE,
                table(OUTBOUND_TABLE, &sid, &sval),
                TableRole::Vertex,
            )
            .unwrap();
    }
    Case {
        catalog,
        params,
        edges: g.edge_pairs(),
        values: ids.into_iter().zip(values).collect(),
        senders,
    }
}

fn table(name: &str, ids: &[i64], values: &[Scalar]) -> ColumnTable {
    let ty = values
        .first()
        .and_then(Scalar::logical_type)
        .unwrap_or(colgraph::storage::LogicalType::Float64);
    ColumnTable::new(
        name,
        vec![
            Column::new("id", ids.to_vec()),
            Column::new(
                "value",
                colgraph::storage::ColumnData::from_scalars(ty, values).unwrap(),
            ),
        ],
    )
    .unwrap()
}

/// Expected V′ computed by sending every message along every edge.
fn message_passing_oracle(kind: &VertexComputeKind, c: &Case) -> BTreeMap<i64, Scalar> {
    let mut inbox: BTreeMap<i64, Vec<Scalar>> = BTreeMap::new();
    for &(a, b) in &c.edges {
        if let Some(s) = c.senders.get(&a) {
            let m = match (kind, s) {
                (VertexComputeKind::Sssp { .. }, Scalar::Int(d)) => {
                    Scalar::Int(d.saturating_add(1))
                }
                _ => s.clone(),
            };
            inbox.entry(b).or_default().push(m);
        }
    }
    let n = c.values.len() as f64;
    inbox
        .into_iter()
        .filter_map(|(v, msgs)| match kind {
            VertexComputeKind::PageRank => {
                let sum: f64 = msgs.iter().map(|m| m.as_f64().unwrap()).sum();
                Some((v, Scalar::Float(0.15 / n + 0.85 * sum)))
            }
            _ => {
                let best = msgs.iter().map(|m| m.as_i64().unwrap()).min().unwrap();
                (best < c.values[&v].as_i64().unwrap()).then_some((v, Scalar::Int(best)))
            }
        })
        .collect()
}

fn as_map(t: &ColumnTable) -> BTreeMap<i64, Scalar> {
    let ids = t.i64_column("id").unwrap();
    let v = &t.column("value").unwrap().data;
    let map: BTreeMap<i64, Scalar> = ids
        .iter()
        .enumerate()
        .map(|(i, &id)| (id, v.scalar(i)))
        .collect();
    assert_eq!(map.len(), ids.len(), "duplicate ids in {}", t.name());
    map
}

fn assert_same(got: &BTreeMap<i64, Scalar>, want: &BTreeMap<i64, Scalar>, what: &str) {
    assert_eq!(
        got.keys().collect::<Vec<_>>(),
        want.keys().collect::<Vec<_>>(),
        "{what}: vertex sets"
    );
    for (id, w) in want {
        match (&got[id], w) {
            (Scalar::Float(g), Scalar::Float(w)) => {
                assert!((g - w).abs() <= 1e-12, "{what}: vertex {id} {g} vs {w}")
            }
            (g, w) => assert_eq!(g, w, "{what}: vertex {id}"),
        }
    }
}

/// Executes every stage and checks each V′ against the oracle.
pub fn check_soundness(kind: VertexComputeKind, n: usize, p: f64, seed: u64, partitions: usize) {
    let c = case(&kind, n, p, seed, partitions);
    let want = message_passing_oracle(&kind, &c);
    let opts = ExecOptions::default();
    let mut plans = stages(kind.clone());
    plans.push(choose_physical(plans.last().unwrap(), &c.catalog).unwrap());

    let edge = c.catalog.entry(EDGE_TABLE).unwrap().table.clone();
    let sender_name = match kind {
        VertexComputeKind::PageRank => OUTBOUND_TABLE,
        _ => VERTEX_TABLE,
    };
    let sender_table = if sender_name == VERTEX_TABLE {
        let ids: Vec<i64> = c.values.keys().copied().collect();
        let vals: Vec<Scalar> = c.values.values().cloned().collect();
        table(VERTEX_TABLE, &ids, &vals)
    } else {
        c.catalog.entry(sender_name).unwrap().table.clone()
    };
    let messages = materialize_messages(&kind, &sender_table, &edge).unwrap();
    let r0 = run_vertex_centric(&plans[0], &c.catalog, messages, &c.params, &opts).unwrap();
    assert_same(&as_map(&r0.table), &want, &format!("{kind:?} stage 0"));

    // M′ carries each new value along the out-edges of its vertex.
    let (name, mprime) = &r0.side_tables[0];
    assert_eq!(name, "M'");
    let mut got_m = mprime.sorted_rows();
    let mut want_m = materialize_messages(&kind, &r0.table, &edge)
        .unwrap()
        .sorted_rows();
    got_m.sort_by(|a, b| a.partial_cmp(b).unwrap());
    want_m.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(got_m, want_m, "{kind:?} M'");

    for (i, plan) in plans.iter().enumerate().skip(1) {
        let r = execute(plan, &c.catalog, &c.params, &opts).unwrap();
        assert!(r.side_tables.is_empty());
        assert_same(&as_map(&r.table), &want, &format!("{kind:?} stage {i}"));
        let no_sip = ExecOptions {
            sip: false,
            ..ExecOptions::default()
        };
        let r = execute(plan, &c.catalog, &c.params, &no_sip).unwrap();
        assert_same(
            &as_map(&r.table),
            &want,
            &format!("{kind:?} stage {i} without sip"),
        );
    }
}
