// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

use super::Neighbors;
use crate::error::Result;
use crate::storage::GraphStore;

/// Compressed sparse rows over vertex positions in the sorted id array.
#[derive(Debug, Clone)]
pub(crate) struct Adjacency {
    pub ids: Vec<i64>,
    pub offsets: Vec<usize>,
    /// Neighbor positions, ascending within each row.
    pub targets: Vec<u32>,
    /// Neighbor ids, aligned with `targets`.
    pub target_ids: Vec<i64>,
    pub weights: Option<Vec<f64>>,
}

impl Adjacency {
    pub fn build(graph: &GraphStore, neighbors: Neighbors) -> Result<Adjacency> {
        let ids = graph.vertex_ids().to_vec();
        let from = graph.edge.i64_column("from_node")?;
        let to = graph.edge.i64_column("to_node")?;
        let weights = if graph.has_weights() {
            Some(graph.edge.f64_column("weight")?)
        } else {
            None
        };
        let pos = |v: i64| ids.binary_search(&v).expect("edge endpoints are vertices") as u32;
        let mut rows: Vec<(u32, u32, f64)> = Vec::with_capacity(from.len() * 2);
        for i in 0..from.len() {
            let w = weights.map_or(1.0, |w| w[i]);
            let (a, b) = (pos(from[i]), pos(to[i]));
            rows.push((a, b, w));
            if neighbors == Neighbors::Undirected && graph.is_directed() {
                rows.push((b, a, w));
            }
        }
        rows.sort_unstable_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)).then(x.2.total_cmp(&y.2)));
        rows.dedup_by_key(|r| (r.0, r.1));

        let mut offsets = vec![0usize; ids.len() + 1];
        for r in &rows {
            offsets[r.0 as usize + 1] += 1;
        }
        for i in 0..ids.len() {
            offsets[i + 1] += offsets[i];
        }
        let targets: Vec<u32> = rows.iter().map(|r| r.1).collect();
        let target_ids = targets.iter().map(|&t| ids[t as usize]).collect();
        let weights = weights.map(|_| rows.iter().map(|r| r.2).collect());
        Ok(Adjacency {
            ids,
            offsets,
            targets,
            target_ids,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn row(&self, v: usize) -> std::ops::Range<usize> {
        self.offsets[v]..self.offsets[v + 1]
    }

    pub fn position(&self, id: i64) -> Option<u32> {
        self.ids.binary_search(&id).ok().map(|p| p as u32)
    }
}
