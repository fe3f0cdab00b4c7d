// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

//! Small fixture graphs and seeded random graph generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};
use rustc_hash::FxHashSet;

use crate::error::Result;
use crate::storage::{GraphStore, LoadOptions};

/// `0→1→2→3`.
pub const PATH4: &[(i64, i64)] = &[(0, 1), (1, 2), (2, 3)];
/// `0→1, 0→2, 1→3, 2→3`.
pub const DIAMOND: &[(i64, i64)] = &[(0, 1), (0, 2), (1, 3), (2, 3)];
/// `0→1, 1→0`.
pub const CYCLE2: &[(i64, i64)] = &[(0, 1), (1, 0)];
/// `0` and `1` each point at `2, 3, 4`.
pub const BIPARTITE: &[(i64, i64)] = &[(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)];
/// Undirected star with center `0` and leaves `1, 2, 3`.
pub const STAR3U: &[(i64, i64)] = &[(0, 1), (0, 2), (0, 3)];
/// Undirected triangle.
pub const TRIANGLE: &[(i64, i64)] = &[(0, 1), (1, 2), (0, 2)];

pub fn fixture(name: &str) -> Option<(&'static [(i64, i64)], bool)> {
    Some(match name.to_ascii_lowercase().as_str() {
        "path4" => (PATH4, true),
        "diamond" => (DIAMOND, true),
        "cycle2" => (CYCLE2, true),
        "bipartite" => (BIPARTITE, true),
        "star3u" => (STAR3U, false),
        "triangle" => (TRIANGLE, false),
        _ => return None,
    })
}

/// Erdős–Rényi edges over vertices `0..n` with edge probability `p`,
/// without self loops. Undirected graphs list each pair once.
pub fn gnp_edges(n: usize, p: f64, directed: bool, seed: u64) -> Vec<(i64, i64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for a in 0..n {
        let start = if directed { 0 } else { a + 1 };
        for b in start..n {
            if a != b && rng.gen_bool(p) {
                edges.push((a as i64, b as i64));
            }
        }
    }
    edges
}

/// A G(n, p) graph that keeps every vertex in `0..n`, including isolated ones.
pub fn gnp(n: usize, p: f64, directed: bool, seed: u64, partitions: usize) -> Result<GraphStore> {
    let ids: Vec<i64> = (0..n as i64).collect();
    let opts = LoadOptions::directed(directed).with_partitions(partitions);
    GraphStore::from_edges_and_vertices(&gnp_edges(n, p, directed, seed), &ids, &opts)
}

/// Integer weights in `1..=max` for each edge.
pub fn weighted(edges: &[(i64, i64)], max: u32, seed: u64) -> Vec<(i64, i64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    edges
        .iter()
        .map(|&(a, b)| (a, b, rng.gen_range(1..=max) as f64))
        .collect()
}

/// Directed edges with Zipf-distributed endpoints, a cheap stand-in for
/// the skewed degree distributions of social graphs. Self loops are
/// dropped; duplicates are left for the loader to collapse.
pub fn power_law_edges(n: usize, m: usize, exponent: f64, seed: u64) -> Vec<(i64, i64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zipf = Zipf::new(n as u64, exponent).expect("valid zipf parameters");
    // Zipf ranks are shuffled through a fixed permutation so popular ids
    // are spread across the id range.
    let mut perm: Vec<i64> = (0..n as i64).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let mut edges = Vec::with_capacity(m);
    while edges.len() < m {
        let a = rng.gen_range(0..n);
        let b = zipf.sample(&mut rng) as usize - 1;
        if a != b {
            edges.push((perm[a], perm[b]));
        }
    }
    edges
}

/// Exactly `m` distinct directed power-law edges over `0..n` in which
/// every vertex has at least one out-edge. Needs `n ≤ m ≤ n·(n−1)`.
pub fn power_law_exact(n: usize, m: usize, exponent: f64, seed: u64) -> Vec<(i64, i64)> {
    assert!(
        n >= 2 && n <= m && m <= n * (n - 1),
        "cannot place {m} distinct edges on {n} vertices"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut seen: FxHashSet<(i64, i64)> = FxHashSet::default();
    seen.reserve(m);
    for a in 0..n as i64 {
        let mut b = rng.gen_range(0..n as i64 - 1);
        if b >= a {
            b += 1;
        }
        seen.insert((a, b));
    }
    let mut round = 0;
    while seen.len() < m {
        let batch = power_law_edges(n, (m - seen.len()) * 2, exponent, seed.wrapping_add(round));
        for e in batch {
            if seen.len() == m {
                break;
            }
            seen.insert(e);
        }
        round += 1;
    }
    let mut edges: Vec<(i64, i64)> = seen.into_iter().collect();
    edges.sort_unstable();
    edges
}
