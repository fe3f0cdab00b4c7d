// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

use std::sync::Arc;

use rand::distributions::Alphanumeric;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};
use rustc_hash::FxHashMap;

use crate::error::Result;
use crate::storage::{Column, ColumnData, ColumnTable, ColumnValues, GraphStore};

pub const UNIFORM_INT_COLUMNS: usize = 24;
pub const ZIPF_INT_COLUMNS: usize = 8;
pub const FLOAT_COLUMNS: usize = 18;
pub const STRING_COLUMNS: usize = 10;
pub const EDGE_TYPES: [&str; 3] = ["friend", "family", "classmate"];

const ZIPF_SKEWS: [f64; ZIPF_INT_COLUMNS] = [0.5, 0.8, 1.0, 1.2, 1.5, 2.0, 2.5, 3.0];
const ZIPF_DOMAIN: u64 = 10_000;
const STRING_LENGTHS: [usize; 4] = [8, 16, 32, 64];
const STRING_CARDINALITIES: [usize; 4] = [10, 100, 1_000, 10_000];
/// 2016-01-01 and 2026-01-01, seconds since the epoch.
const TIMESTAMP_RANGE: (i64, i64) = (1_451_606_400, 1_767_225_600);

/// Cardinality of uniform column `i`: log-spaced from 2 to 10⁹.
pub fn uniform_cardinality(i: usize) -> i64 {
    let t = i as f64 / (UNIFORM_INT_COLUMNS - 1) as f64;
    (2f64 * (1e9f64 / 2.0).powf(t)).round() as i64
}

/// Half-open range of float column `i`: `[0, 10^(i mod 6))`.
pub fn float_range(i: usize) -> f64 {
    10f64.powi((i % 6) as i32)
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn strings(rng: &mut ChaCha8Rng, rows: usize, len: usize, cardinality: usize) -> ColumnData {
    let dict: Vec<Arc<str>> = (0..cardinality)
        .map(|_| {
            let s: String = (0..len).map(|_| rng.sample(Alphanumeric) as char).collect();
            Arc::from(s)
        })
        .collect();
    let values = (0..rows)
        .map(|_| dict[rng.gen_range(0..cardinality)].clone())
        .collect();
    ColumnValues::Utf8(values).into()
}

/// For each edge row, the row whose generated attributes it takes. Both
/// directions of an undirected edge share the row with `from <= to`.
fn undirected_source(graph: &GraphStore) -> Result<Vec<usize>> {
    let from = graph.edge.i64_column("from_node")?;
    let to = graph.edge.i64_column("to_node")?;
    if graph.is_directed() {
        return Ok((0..from.len()).collect());
    }
    let mut row_of: FxHashMap<(i64, i64), usize> = FxHashMap::default();
    for i in 0..from.len() {
        if from[i] <= to[i] {
            row_of.entry((from[i], to[i])).or_insert(i);
        }
    }
    Ok((0..from.len())
        .map(|i| row_of[&(from[i].min(to[i]), from[i].max(to[i]))])
        .collect())
}

/// Widens the vertex table with synthetic attributes and the edge table
/// with `weight`, `created` and `etype`. The same seed gives identical
/// tables. Uniform int columns are `attribute_0..attribute_23`. Both
/// directions of an undirected edge get the same attributes.
pub fn gen_metadata(graph: &GraphStore, seed: u64) -> Result<GraphStore> {
    let ids = graph.vertex_ids().to_vec();
    let n = ids.len();
    let mut stream = 0u64;
    let mut next_rng = || {
        stream += 1;
        rng_for(seed, stream)
    };

    let mut vcols = vec![Column::new("id", ids)];
    for i in 0..UNIFORM_INT_COLUMNS {
        let mut rng = next_rng();
        let card = uniform_cardinality(i);
        let v: Vec<i64> = (0..n).map(|_| rng.gen_range(0..card)).collect();
        vcols.push(Column::new(format!("attribute_{i}"), v));
    }
    for (i, &s) in ZIPF_SKEWS.iter().enumerate() {
        let mut rng = next_rng();
        let zipf = Zipf::new(ZIPF_DOMAIN, s).expect("valid zipf parameters");
        let v: Vec<i64> = (0..n).map(|_| zipf.sample(&mut rng) as i64).collect();
        vcols.push(Column::new(format!("zipf_{i}"), v));
    }
    for i in 0..FLOAT_COLUMNS {
        let mut rng = next_rng();
        let hi = float_range(i);
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..hi)).collect();
        vcols.push(Column::new(format!("float_{i}"), v));
    }
    for i in 0..STRING_COLUMNS {
        let mut rng = next_rng();
        let data = strings(
            &mut rng,
            n,
            STRING_LENGTHS[i % 4],
            STRING_CARDINALITIES[i % 4],
        );
        vcols.push(Column::new(format!("string_{i}"), data));
    }

    let from = graph.edge.column("from_node")?.clone();
    let to = graph.edge.column("to_node")?.clone();
    let source = undirected_source(graph)?;
    let m = from.len();
    let mut rng = next_rng();
    let weight: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..1.0)).collect();
    let mut rng = next_rng();
    let created: Vec<i64> = (0..m)
        .map(|_| rng.gen_range(TIMESTAMP_RANGE.0..TIMESTAMP_RANGE.1))
        .collect();
    let mut rng = next_rng();
    let etype: Vec<&str> = (0..m).map(|_| EDGE_TYPES[rng.gen_range(0..3)]).collect();
    let weight: Vec<f64> = source.iter().map(|&i| weight[i]).collect();
    let created: Vec<i64> = source.iter().map(|&i| created[i]).collect();
    let etype: Vec<&str> = source.iter().map(|&i| etype[i]).collect();
    let ecols = vec![
        from,
        to,
        Column::new("weight", weight),
        Column::new("created", created),
        Column::new("etype", etype),
    ];
    graph.with_tables(
        ColumnTable::new("vertex", vcols)?,
        ColumnTable::new("edge", ecols)?,
    )
}
