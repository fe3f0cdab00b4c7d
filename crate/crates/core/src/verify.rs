// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

//! Oracle equivalence suites. Each oracle is a direct textbook
//! implementation over a plain edge list and shares no code with the
//! engine.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algos::UNREACHED;
use crate::error::Result;
use crate::gen::{self, BIPARTITE, CYCLE2, DIAMOND, PATH4, STAR3U, TRIANGLE};
use crate::run::{run, Algorithm, Mode, RunSpec};
use crate::storage::{ColumnTable, GraphStore, LoadOptions};

pub const PAGERANK_ITERATIONS: usize = 10;
pub const PAGERANK_TOLERANCE: f64 = 1e-9;
/// Ranks from different engines sum contributions in different orders.
pub const MODE_RANK_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    /// Perturbs one PageRank oracle value so the harness itself can be
    /// shown to fail.
    pub inject_fault: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub graph: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn from_result(
        graph: &str,
        name: &str,
        result: Result<std::result::Result<(), String>>,
    ) -> Check {
        let (passed, detail) = match result {
            Ok(Ok(())) => (true, String::new()),
            Ok(Err(d)) => (false, d),
            Err(e) => (false, format!("error: {e}")),
        };
        Check {
            graph: graph.to_string(),
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

/// Hop distances from `source` by breadth-first search over `edges`.
pub fn bfs_distances(edges: &[(i64, i64)], source: i64) -> BTreeMap<i64, i64> {
    let adj = adjacency(edges);
    let mut dist = BTreeMap::from([(source, 0i64)]);
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        for &u in adj.get(&v).into_iter().flatten() {
            if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(u) {
                e.insert(d + 1);
                queue.push_back(u);
            }
        }
    }
    dist
}

/// Dijkstra with a binary heap over non-negative integer weights.
pub fn dijkstra(edges: &[(i64, i64, i64)], source: i64) -> BTreeMap<i64, i64> {
    let mut adj: BTreeMap<i64, Vec<(i64, i64)>> = BTreeMap::new();
    for &(a, b, w) in edges {
        adj.entry(a).or_default().push((b, w));
    }
    let mut dist = BTreeMap::new();
    let mut heap = BinaryHeap::from([Reverse((0i64, source))]);
    while let Some(Reverse((d, v))) = heap.pop() {
        if dist.contains_key(&v) {
            continue;
        }
        dist.insert(v, d);
        for &(u, w) in adj.get(&v).into_iter().flatten() {
            if !dist.contains_key(&u) {
                heap.push(Reverse((d + w, u)));
            }
        }
    }
    dist
}

fn adjacency(edges: &[(i64, i64)]) -> BTreeMap<i64, BTreeSet<i64>> {
    let mut adj: BTreeMap<i64, BTreeSet<i64>> = BTreeMap::new();
    for &(a, b) in edges {
        adj.entry(a).or_default().insert(b);
    }
    adj
}

fn symmetric(edges: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let set: BTreeSet<(i64, i64)> = edges.iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect();
    set.into_iter().collect()
}

/// Minimum vertex id of each weakly connected component, by BFS.
pub fn bfs_components(ids: &[i64], edges: &[(i64, i64)]) -> BTreeMap<i64, i64> {
    let adj = adjacency(&symmetric(edges));
    let mut label = BTreeMap::new();
    for &start in ids {
        if label.contains_key(&start) {
            continue;
        }
        let mut members = vec![start];
        label.insert(start, start);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &u in adj.get(&v).into_iter().flatten() {
                if !label.contains_key(&u) {
                    label.insert(u, start);
                    members.push(u);
                    queue.push_back(u);
                }
            }
        }
        let min = *members.iter().min().expect("component has a member");
        for m in members {
            label.insert(m, min);
        }
    }
    label
}

/// Power iteration from `1/n` with damping 0.85; rank at vertices without
/// out-edges is dropped.
pub fn power_iteration(ids: &[i64], edges: &[(i64, i64)], iterations: usize) -> BTreeMap<i64, f64> {
    let n = ids.len() as f64;
    let mut outdeg: BTreeMap<i64, f64> = BTreeMap::new();
    for &(a, _) in edges {
        *outdeg.entry(a).or_default() += 1.0;
    }
    let mut rank: BTreeMap<i64, f64> = ids.iter().map(|&v| (v, 1.0 / n)).collect();
    for _ in 0..iterations {
        let mut next: BTreeMap<i64, f64> = ids.iter().map(|&v| (v, 0.0)).collect();
        for &(a, b) in edges {
            *next.get_mut(&b).expect("endpoint is a vertex") += rank[&a] / outdeg[&a];
        }
        for r in next.values_mut() {
            *r = 0.15 / n + 0.85 * *r;
        }
        rank = next;
    }
    rank
}

/// Pairs `a < b` sharing more than `threshold` out-neighbors.
pub fn brute_overlap(edges: &[(i64, i64)], threshold: i64) -> Vec<(i64, i64, i64)> {
    let adj = adjacency(edges);
    let mut out = Vec::new();
    for (&a, na) in &adj {
        for (&b, nb) in adj.range(a + 1..) {
            let common = na.intersection(nb).count() as i64;
            if common > threshold {
                out.push((a, b, common));
            }
        }
    }
    out
}

/// Vertices with more than `threshold` non-adjacent neighbor pairs.
pub fn brute_weak_ties(edges: &[(i64, i64)], threshold: i64) -> Vec<(i64, i64)> {
    let adj = adjacency(edges);
    let mut out = Vec::new();
    for (&v, nv) in &adj {
        let nv: Vec<i64> = nv.iter().copied().filter(|&u| u != v).collect();
        let mut c = 0;
        for i in 0..nv.len() {
            for j in i + 1..nv.len() {
                if !adj.get(&nv[i]).is_some_and(|s| s.contains(&nv[j])) {
                    c += 1;
                }
            }
        }
        if c > threshold {
            out.push((v, c));
        }
    }
    out
}

fn ints(t: &ColumnTable, cols: &[&str]) -> Result<Vec<Vec<i64>>> {
    let columns = cols
        .iter()
        .map(|c| t.i64_column(c))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..t.row_count())
        .map(|i| columns.iter().map(|c| c[i]).collect())
        .collect())
}

fn int_map(t: &ColumnTable, value: &str) -> Result<BTreeMap<i64, i64>> {
    Ok(ints(t, &["id", value])?
        .into_iter()
        .map(|r| (r[0], r[1]))
        .collect())
}

fn float_map(t: &ColumnTable, value: &str) -> Result<BTreeMap<i64, f64>> {
    let ids = t.i64_column("id")?;
    let v = t.f64_column(value)?;
    Ok(ids.iter().copied().zip(v.iter().copied()).collect())
}

fn compare_floats(
    got: &BTreeMap<i64, f64>,
    want: &BTreeMap<i64, f64>,
    tol: f64,
) -> std::result::Result<(), String> {
    if got.len() != want.len() {
        return Err(format!("{} vertices, expected {}", got.len(), want.len()));
    }
    for (id, w) in want {
        let g = got.get(id).copied().unwrap_or(f64::NAN);
        if (g - w).abs() > tol || g.is_nan() {
            return Err(format!("vertex {id}: {g} vs {w}"));
        }
    }
    Ok(())
}

fn compare<T: PartialEq + std::fmt::Debug>(got: T, want: T) -> std::result::Result<(), String> {
    if got == want {
        Ok(())
    } else {
        let text = format!("got {got:?}, expected {want:?}");
        Err(text.chars().take(240).collect())
    }
}

fn spec(algorithm: Algorithm, mode: Mode) -> RunSpec {
    let mut s = RunSpec::new(algorithm, mode);
    s.iterations = PAGERANK_ITERATIONS;
    s
}

fn check_sssp(g: &GraphStore, sources: &[i64]) -> Result<std::result::Result<(), String>> {
    let edges = g.edge_pairs();
    for &s in sources {
        let mut sp = spec(Algorithm::Sssp, Mode::Sql);
        sp.source = Some(s);
        let got = int_map(&run(g, "", &sp)?.table, "d")?;
        let got: BTreeMap<i64, i64> = got.into_iter().filter(|&(_, d)| d != UNREACHED).collect();
        let weighted: Vec<(i64, i64, i64)> = edges.iter().map(|&(a, b)| (a, b, 1)).collect();
        if let Err(e) = compare(got, dijkstra(&weighted, s)) {
            return Ok(Err(format!("source {s}: {e}")));
        }
    }
    Ok(Ok(()))
}

fn check_cc(g: &GraphStore) -> Result<std::result::Result<(), String>> {
    let got = int_map(
        &run(g, "", &spec(Algorithm::Cc, Mode::Sql))?.table,
        "component",
    )?;
    Ok(compare(
        got,
        bfs_components(g.vertex_ids(), &g.edge_pairs()),
    ))
}

fn check_pagerank(g: &GraphStore, opts: &VerifyOptions) -> Result<std::result::Result<(), String>> {
    let got = float_map(
        &run(g, "", &spec(Algorithm::PageRank, Mode::Sql))?.table,
        "rank",
    )?;
    let mut want = power_iteration(g.vertex_ids(), &g.edge_pairs(), PAGERANK_ITERATIONS);
    if opts.inject_fault {
        if let Some(r) = want.values_mut().next() {
            *r += 1e-3;
        }
    }
    Ok(compare_floats(&got, &want, PAGERANK_TOLERANCE))
}

fn check_one_hop(g: &GraphStore, thresholds: &[i64]) -> Result<std::result::Result<(), String>> {
    let edges = g.edge_pairs();
    for &t in thresholds {
        let mut sp = spec(Algorithm::Overlap, Mode::Sql);
        sp.threshold = t;
        let got: Vec<(i64, i64, i64)> = ints(&run(g, "", &sp)?.table, &["n1", "n2", "common"])?
            .into_iter()
            .map(|r| (r[0], r[1], r[2]))
            .collect();
        if let Err(e) = compare(got, brute_overlap(&edges, t)) {
            return Ok(Err(format!("overlap threshold {t}: {e}")));
        }
        if !g.is_directed() {
            sp.algorithm = Algorithm::WeakTies;
            let got: Vec<(i64, i64)> = ints(&run(g, "", &sp)?.table, &["id", "c"])?
                .into_iter()
                .map(|r| (r[0], r[1]))
                .collect();
            if let Err(e) = compare(got, brute_weak_ties(&edges, t)) {
                return Ok(Err(format!("weak ties threshold {t}: {e}")));
            }
        }
    }
    Ok(Ok(()))
}

fn check_modes(g: &GraphStore, source: i64) -> Result<std::result::Result<(), String>> {
    for algo in [Algorithm::Sssp, Algorithm::Cc, Algorithm::PageRank] {
        let mut tables = Vec::new();
        for mode in Mode::ALL {
            let mut sp = spec(algo, mode);
            sp.source = Some(source);
            let out = run(g, "", &sp)?;
            if mode == Mode::Shm && out.report.totals.bytes_written != 0 {
                return Ok(Err(format!(
                    "{algo} shm wrote {} bytes",
                    out.report.totals.bytes_written
                )));
            }
            tables.push((mode, out.table));
        }
        let col = algo.value_column();
        for (mode, t) in &tables[1..] {
            let r = if algo == Algorithm::PageRank {
                compare_floats(
                    &float_map(t, col)?,
                    &float_map(&tables[0].1, col)?,
                    MODE_RANK_TOLERANCE,
                )
            } else {
                compare(int_map(t, col)?, int_map(&tables[0].1, col)?)
            };
            if let Err(e) = r {
                return Ok(Err(format!("{algo} {mode} vs sql: {e}")));
            }
        }
    }
    Ok(Ok(()))
}

fn load(edges: &[(i64, i64)], directed: bool) -> Result<GraphStore> {
    GraphStore::from_edges(edges, &LoadOptions::directed(directed).with_partitions(2))
}

/// Every check on the built-in fixtures.
pub fn small_suite(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let fixtures: [(&str, &[(i64, i64)], bool); 6] = [
        ("PATH4", PATH4, true),
        ("DIAMOND", DIAMOND, true),
        ("CYCLE2", CYCLE2, true),
        ("BIPARTITE", BIPARTITE, true),
        ("STAR3U", STAR3U, false),
        ("TRIANGLE", TRIANGLE, false),
    ];
    let mut checks = Vec::new();
    for (name, edges, directed) in fixtures {
        let g = load(edges, directed)?;
        let first = g.vertex_ids()[0];
        checks.push(Check::from_result(
            name,
            "sssp-dijkstra",
            check_sssp(&g, g.vertex_ids()),
        ));
        checks.push(Check::from_result(name, "cc-bfs", check_cc(&g)));
        checks.push(Check::from_result(
            name,
            "pagerank-power",
            check_pagerank(&g, opts),
        ));
        checks.push(Check::from_result(
            name,
            "one-hop-brute",
            check_one_hop(&g, &[0, 1, 2, 5]),
        ));
        checks.push(Check::from_result(
            name,
            "modes-agree",
            check_modes(&g, first),
        ));
    }
    Ok(checks)
}

/// Five checks on each of `graphs` seeded random graphs: directed
/// G(n, 0.05) with n ≤ 256 for the algorithms, undirected with n ≤ 128
/// for the one-hop queries.
pub fn random_suite(seed: u64, graphs: usize, opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    for i in 0..graphs {
        let n = rng.gen_range(16..=256);
        let gseed = rng.gen::<u64>();
        let name = format!("gnp-{i}(n={n})");
        let g = gen::gnp(n, 0.05, true, gseed, 2)?;
        let ids = g.vertex_ids();
        let sources: Vec<i64> = (0..5).map(|k| ids[k * ids.len() / 5]).collect();
        checks.push(Check::from_result(
            &name,
            "sssp-dijkstra",
            check_sssp(&g, &sources),
        ));
        checks.push(Check::from_result(&name, "cc-bfs", check_cc(&g)));
        checks.push(Check::from_result(
            &name,
            "pagerank-power",
            check_pagerank(&g, opts),
        ));
        let u = gen::gnp(n.min(128), 0.05, false, gseed, 2)?;
        checks.push(Check::from_result(
            &name,
            "one-hop-brute",
            check_one_hop(&u, &[0, 1, 2, 5]),
        ));
        checks.push(Check::from_result(
            &name,
            "modes-agree",
            check_modes(&g, sources[0]),
        ));
    }
    Ok(checks)
}

/// Fixed-width table of check results.
pub fn format_checks(checks: &[Check]) -> String {
    let width = checks
        .iter()
        .map(|c| c.graph.len())
        .max()
        .unwrap_or(5)
        .max(5);
    let mut out = format!("{:<width$}  {:<15}  result\n", "graph", "check");
    for c in checks {
        let status = if c.passed {
            "pass".to_string()
        } else {
            format!("FAIL  {}", c.detail)
        };
        out.push_str(&format!("{:<width$}  {:<15}  {status}\n", c.graph, c.name));
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    out.push_str(&format!(
        "{} checks, {} passed, {} failed\n",
        checks.len(),
        checks.len() - failed,
        failed
    ));
    out
}
