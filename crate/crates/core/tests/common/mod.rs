// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

//! Reference implementations used as test oracles. They work on plain edge
//! lists and share no code with the engine.

#![allow(dead_code)]

pub mod soundness;

use std::collections::BTreeMap;

use petgraph::algo::dijkstra;
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::unionfind::UnionFind;

use colgraph::storage::ColumnTable;

/// Shortest hop or weight distances from `source`; unreachable vertices
/// are absent.
pub fn dijkstra_oracle(ids: &[i64], edges: &[(i64, i64, f64)], source: i64) -> BTreeMap<i64, f64> {
    let index: BTreeMap<i64, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut g = DiGraph::<i64, f64>::with_capacity(ids.len(), edges.len());
    for &v in ids {
        g.add_node(v);
    }
    for &(a, b, w) in edges {
        g.add_edge(NodeIndex::new(index[&a]), NodeIndex::new(index[&b]), w);
    }
    dijkstra(&g, NodeIndex::new(index[&source]), None, |e| *e.weight())
        .into_iter()
        .map(|(n, d)| (ids[n.index()], d))
        .collect()
}

/// Minimum vertex id of each vertex's weakly connected component.
pub fn wcc_oracle(ids: &[i64], edges: &[(i64, i64)]) -> BTreeMap<i64, i64> {
    let index: BTreeMap<i64, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut uf = UnionFind::<usize>::new(ids.len());
    for &(a, b) in edges {
        uf.union(index[&a], index[&b]);
    }
    let mut min_of: BTreeMap<usize, i64> = BTreeMap::new();
    for (i, &v) in ids.iter().enumerate() {
        let m = min_of.entry(uf.find(i)).or_insert(v);
        *m = (*m).min(v);
    }
    ids.iter()
        .enumerate()
        .map(|(i, &v)| (v, min_of[&uf.find(i)]))
        .collect()
}

/// `r'(v) = 0.15/n + 0.85 · Σ r(u)/outdeg(u)` over in-edges `u→v`,
/// starting from `1/n`; rank held by vertices without out-edges leaks.
pub fn pagerank_oracle(ids: &[i64], edges: &[(i64, i64)], iterations: usize) -> BTreeMap<i64, f64> {
    let n = ids.len();
    let index: BTreeMap<i64, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut outdeg = vec![0usize; n];
    for &(a, _) in edges {
        outdeg[index[&a]] += 1;
    }
    let mut r = vec![1.0 / n as f64; n];
    for _ in 0..iterations {
        let mut sum = vec![0.0; n];
        for &(a, b) in edges {
            let a = index[&a];
            sum[index[&b]] += r[a] / outdeg[a] as f64;
        }
        r = sum.iter().map(|s| 0.15 / n as f64 + 0.85 * s).collect();
    }
    ids.iter().zip(r).map(|(&v, x)| (v, x)).collect()
}

/// Undirected edge list with both directions, no duplicates.
pub fn symmetrize(edges: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut out: Vec<(i64, i64)> = edges.iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect();
    out.sort_unstable();
    out.dedup();
    out
}

pub fn int_map(table: &ColumnTable, key: &str, value: &str) -> BTreeMap<i64, i64> {
    let k = table.i64_column(key).unwrap();
    let v = table.column(value).unwrap();
    k.iter()
        .enumerate()
        .map(|(i, &id)| (id, v.data.scalar(i).as_i64().expect("non-null int")))
        .collect()
}

pub fn float_map(table: &ColumnTable, key: &str, value: &str) -> BTreeMap<i64, f64> {
    let k = table.i64_column(key).unwrap();
    let v = table.column(value).unwrap();
    k.iter()
        .enumerate()
        .map(|(i, &id)| (id, v.data.scalar(i).as_f64().expect("non-null number")))
        .collect()
}

pub fn assert_close(got: &BTreeMap<i64, f64>, want: &BTreeMap<i64, f64>, tol: f64) {
    assert_eq!(got.len(), want.len(), "vertex sets differ");
    for (id, w) in want {
        let g = got[id];
        assert!((g - w).abs() <= tol, "vertex {id}: got {g}, want {w}");
    }
}
