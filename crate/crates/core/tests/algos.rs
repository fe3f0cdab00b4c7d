// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

mod common;

use std::collections::BTreeMap;

use colgraph::algos::{
    apply_delta, connected_components, pagerank, pagerank_plans, sssp, sssp_plan, sssp_with,
    AlgoConfig, ApplyMode, IterationPolicy, SsspOptions, VertexState, UNREACHED,
};
use colgraph::exec::{execute, ExecOptions};
use colgraph::expr::Params;
use colgraph::gen::{self, CYCLE2, DIAMOND, PATH4};
use colgraph::storage::{Column, ColumnTable, GraphStore, LoadOptions, TableRole, VERTEX_TABLE};
use colgraph::Error;
use common::*;
use proptest::prelude::*;

fn directed(edges: &[(i64, i64)]) -> GraphStore {
    GraphStore::from_edges(edges, &LoadOptions::directed(true).with_partitions(1)).unwrap()
}

fn cfg() -> AlgoConfig {
    AlgoConfig::default()
}

fn policy_cfg(policy: IterationPolicy, partitions_sip: bool) -> AlgoConfig {
    AlgoConfig {
        exec: ExecOptions {
            sip: partitions_sip,
            ..ExecOptions::default()
        },
        policy,
    }
}

fn ranks(g: &GraphStore, iterations: usize) -> BTreeMap<i64, f64> {
    float_map(
        &pagerank(g, iterations, &cfg()).unwrap().table,
        "id",
        "rank",
    )
}

fn distances(g: &GraphStore, source: i64, cfg: &AlgoConfig) -> BTreeMap<i64, i64> {
    int_map(&sssp(g, source, cfg).unwrap().table, "id", "d")
}

fn labels(g: &GraphStore, cfg: &AlgoConfig) -> BTreeMap<i64, i64> {
    int_map(
        &connected_components(g, cfg).unwrap().table,
        "id",
        "component",
    )
}

fn unit(edges: &[(i64, i64)]) -> Vec<(i64, i64, f64)> {
    edges.iter().map(|&(a, b)| (a, b, 1.0)).collect()
}

/// Dijkstra distances with the unreached sentinel filled in.
fn hop_oracle(g: &GraphStore, source: i64) -> BTreeMap<i64, i64> {
    let d = dijkstra_oracle(g.vertex_ids(), &unit(&g.edge_pairs()), source);
    g.vertex_ids()
        .iter()
        .map(|&v| (v, d.get(&v).map_or(UNREACHED, |&x| x as i64)))
        .collect()
}

#[test]
fn pagerank_cycle2_stays_uniform() {
    let g = directed(CYCLE2);
    for k in [1, 2, 7] {
        assert_close(&ranks(&g, k), &BTreeMap::from([(0, 0.5), (1, 0.5)]), 1e-15);
    }
}

#[test]
fn pagerank_diamond_one_iteration() {
    let got = ranks(&directed(DIAMOND), 1);
    let want = BTreeMap::from([(0, 0.0375), (1, 0.14375), (2, 0.14375), (3, 0.4625)]);
    assert_close(&got, &want, 1e-15);
    assert_close(&got, &pagerank_oracle(&[0, 1, 2, 3], DIAMOND, 1), 1e-15);
}

#[test]
fn pagerank_path4_matches_power_iteration() {
    let g = directed(PATH4);
    for k in 1..=6 {
        assert_close(
            &ranks(&g, k),
            &pagerank_oracle(&[0, 1, 2, 3], PATH4, k),
            1e-12,
        );
    }
}

#[test]
fn pagerank_mass_is_conserved_without_dangling_vertices() {
    let edges = [(0, 1), (1, 2), (2, 0), (2, 1), (1, 3), (3, 0)];
    let total: f64 = ranks(&directed(&edges), 10).values().sum();
    assert!((total - 1.0).abs() < 1e-12, "total rank {total}");
}

#[test]
fn pagerank_records_one_replace_per_iteration() {
    let out = pagerank(&directed(DIAMOND), 3, &cfg()).unwrap();
    assert_eq!(out.iterations.len(), 3);
    assert!(out
        .iterations
        .iter()
        .all(|r| r.mode == ApplyMode::Replace && r.bytes_written > 0));
}

#[test]
fn pagerank_plans_eliminate_the_receiver_join() {
    let g = directed(DIAMOND);
    let mut catalog = g.catalog();
    catalog
        .register(
            "v_outbound",
            ColumnTable::new(
                "v_outbound",
                vec![
                    Column::new("id", vec![0i64]),
                    Column::new("value", vec![0.5]),
                ],
            )
            .unwrap(),
            TableRole::Vertex,
        )
        .unwrap();
    let plans = pagerank_plans(&catalog).unwrap();
    assert_eq!(plans.iteration.count_joins(), 1);
}

#[test]
fn sssp_fixtures() {
    assert_eq!(
        distances(&directed(PATH4), 0, &cfg()),
        BTreeMap::from([(0, 0), (1, 1), (2, 2), (3, 3)])
    );
    assert_eq!(
        distances(&directed(DIAMOND), 0, &cfg()),
        BTreeMap::from([(0, 0), (1, 1), (2, 1), (3, 2)])
    );
}

#[test]
fn sssp_unreachable_vertex_keeps_sentinel() {
    let g = GraphStore::from_edges_and_vertices(
        PATH4,
        &[9],
        &LoadOptions::directed(true).with_partitions(1),
    )
    .unwrap();
    let d = distances(&g, 0, &cfg());
    assert_eq!(d[&9], UNREACHED);
    assert_eq!(d[&3], 3);
}

#[test]
fn sssp_unknown_source_is_domain_error() {
    assert!(matches!(
        sssp(&directed(PATH4), 42, &cfg()),
        Err(Error::Domain(_))
    ));
}

#[test]
fn sssp_iterations_stop_on_empty_delta() {
    let out = sssp(&directed(PATH4), 0, &cfg()).unwrap();
    let updates: Vec<usize> = out.iterations.iter().map(|r| r.updates).collect();
    assert_eq!(updates, vec![1, 1, 1, 0]);
}

#[test]
fn sssp_one_iteration_plan_on_path4() {
    let g = directed(PATH4);
    let mut catalog = g.catalog();
    let vertex = ColumnTable::new(
        VERTEX_TABLE,
        vec![
            Column::new("id", vec![0i64, 1, 2, 3]),
            Column::new("value", vec![0, UNREACHED, UNREACHED, UNREACHED]),
        ],
    )
    .unwrap();
    catalog
        .insert(VERTEX_TABLE, VertexState::new(vertex, 1).unwrap().entry())
        .unwrap();
    let update = ColumnTable::new(
        "v_update",
        vec![
            Column::new("id", vec![0i64]),
            Column::new("value", vec![0i64]),
        ],
    )
    .unwrap();
    catalog
        .register("v_update", update, TableRole::Vertex)
        .unwrap();
    let plan = sssp_plan(false, "v_update", &catalog).unwrap();
    let delta = execute(&plan, &catalog, &Params::default(), &ExecOptions::default())
        .unwrap()
        .table;
    assert_eq!(int_map(&delta, "id", "value"), BTreeMap::from([(1, 1)]));
}

#[test]
fn weighted_sssp_matches_dijkstra() {
    let edges = gen::gnp_edges(60, 0.08, true, 11);
    let weighted = gen::weighted(&edges, 9, 12);
    let ids: Vec<i64> = (0..60).collect();
    let g =
        GraphStore::from_weighted_edges(&weighted, &LoadOptions::directed(true).with_partitions(2))
            .unwrap();
    let source = g.vertex_ids()[0];
    let out = sssp_with(&g, source, SsspOptions { weighted: true }, &cfg()).unwrap();
    let got = float_map(&out.table, "id", "d");
    let want = dijkstra_oracle(&ids, &weighted, source);
    for (v, d) in got {
        match want.get(&v) {
            Some(w) => assert_eq!(d, *w, "vertex {v}"),
            None => assert!(d.is_infinite(), "vertex {v} should be unreached"),
        }
    }
}

#[test]
fn weighted_sssp_needs_weights() {
    let r = sssp_with(&directed(PATH4), 0, SsspOptions { weighted: true }, &cfg());
    assert!(matches!(r, Err(Error::Domain(_))));
}

#[test]
fn sssp_policies_agree() {
    let g = gen::gnp(120, 0.04, true, 5, 4).unwrap();
    let reference = hop_oracle(&g, 0);
    for threshold in [0, 1, 3, 5000, usize::MAX] {
        for incremental in [true, false] {
            for sip in [true, false] {
                let policy = IterationPolicy {
                    update_replace_threshold: threshold,
                    incremental,
                    ..IterationPolicy::default()
                };
                let got = distances(&g, 0, &policy_cfg(policy, sip));
                assert_eq!(
                    got, reference,
                    "threshold {threshold} incremental {incremental} sip {sip}"
                );
            }
        }
    }
}

#[test]
fn sssp_modes_follow_threshold() {
    let g = directed(&[(0, 1), (0, 2), (0, 3), (1, 4)]);
    let policy = IterationPolicy {
        update_replace_threshold: 2,
        ..IterationPolicy::default()
    };
    let out = sssp(&g, 0, &policy_cfg(policy, true)).unwrap();
    let modes: Vec<(usize, ApplyMode)> =
        out.iterations.iter().map(|r| (r.updates, r.mode)).collect();
    assert_eq!(modes[0], (3, ApplyMode::Replace));
    assert_eq!(modes[1], (1, ApplyMode::Update));
}

#[test]
fn cc_two_undirected_components() {
    let g = GraphStore::from_edges(
        &[(0, 1), (2, 3)],
        &LoadOptions::directed(false).with_partitions(1),
    )
    .unwrap();
    assert_eq!(
        labels(&g, &cfg()),
        BTreeMap::from([(0, 0), (1, 0), (2, 2), (3, 2)])
    );
}

#[test]
fn cc_directed_path_with_and_without_alternation() {
    let reversed: Vec<(i64, i64)> = PATH4.iter().map(|&(a, b)| (b, a)).collect();
    for edges in [PATH4.to_vec(), reversed] {
        for alternate in [true, false] {
            let policy = IterationPolicy {
                cc_alternate_direction: alternate,
                ..IterationPolicy::default()
            };
            let got = labels(&directed(&edges), &policy_cfg(policy, true));
            assert_eq!(
                got,
                BTreeMap::from([(0, 0), (1, 0), (2, 0), (3, 0)]),
                "alternate {alternate}"
            );
        }
    }
}

#[test]
fn cc_random_graph_matches_bfs_components() {
    let g = gen::gnp(50, 0.03, true, 3, 2).unwrap();
    let want = wcc_oracle(g.vertex_ids(), &g.edge_pairs());
    assert_eq!(labels(&g, &cfg()), want);
}

#[test]
fn apply_delta_examples() {
    let vertex = ColumnTable::new(
        "vertex",
        vec![
            Column::new("id", vec![0i64, 1]),
            Column::new("value", vec![f64::INFINITY, f64::INFINITY]),
        ],
    )
    .unwrap();
    let delta = ColumnTable::new(
        "d",
        vec![
            Column::new("id", vec![1i64]),
            Column::new("value", vec![1.0]),
        ],
    )
    .unwrap();
    let replaced = apply_delta(&vertex, &delta, ApplyMode::Replace).unwrap();
    let updated = apply_delta(&vertex, &delta, ApplyMode::Update).unwrap();
    assert_eq!(
        float_map(&replaced, "id", "value"),
        BTreeMap::from([(0, f64::INFINITY), (1, 1.0)])
    );
    assert_eq!(replaced.sorted_rows(), updated.sorted_rows());

    let empty = ColumnTable::new(
        "d",
        vec![
            Column::new("id", Vec::<i64>::new()),
            Column::new("value", Vec::<f64>::new()),
        ],
    )
    .unwrap();
    for mode in [ApplyMode::Update, ApplyMode::Replace] {
        assert_eq!(
            apply_delta(&vertex, &empty, mode).unwrap().sorted_rows(),
            vertex.sorted_rows()
        );
    }
}

#[test]
fn apply_delta_rejects_unknown_vertex() {
    let vertex = ColumnTable::new(
        "vertex",
        vec![
            Column::new("id", vec![0i64]),
            Column::new("value", vec![0i64]),
        ],
    )
    .unwrap();
    let delta = ColumnTable::new(
        "d",
        vec![
            Column::new("id", vec![5i64]),
            Column::new("value", vec![1i64]),
        ],
    )
    .unwrap();
    for mode in [ApplyMode::Update, ApplyMode::Replace] {
        assert!(matches!(
            apply_delta(&vertex, &delta, mode),
            Err(Error::Consistency(_))
        ));
    }
    let mut state = VertexState::new(vertex, 1).unwrap();
    assert!(matches!(
        state.apply(&delta, ApplyMode::Update, &ExecOptions::default()),
        Err(Error::Consistency(_))
    ));
}

#[test]
fn vertex_state_overlay_and_replace_agree() {
    let vertex = ColumnTable::new(
        "vertex",
        vec![
            Column::new("id", vec![0i64, 1, 2]),
            Column::new("value", vec![5i64, 6, 7]),
        ],
    )
    .unwrap();
    let d1 = ColumnTable::new(
        "d",
        vec![
            Column::new("id", vec![1i64]),
            Column::new("value", vec![0i64]),
        ],
    )
    .unwrap();
    let d2 = ColumnTable::new(
        "d",
        vec![
            Column::new("id", vec![2i64, 0]),
            Column::new("value", vec![1i64, 2]),
        ],
    )
    .unwrap();
    let opts = ExecOptions::default();
    let mut a = VertexState::new(vertex.clone(), 2).unwrap();
    let mut b = VertexState::new(vertex, 2).unwrap();
    for d in [&d1, &d2] {
        a.apply(d, ApplyMode::Update, &opts).unwrap();
        b.apply(d, ApplyMode::Replace, &opts).unwrap();
    }
    assert_eq!(a.overlay_len(), 3);
    assert_eq!(b.overlay_len(), 0);
    assert_eq!(
        a.materialize().unwrap().sorted_rows(),
        b.materialize().unwrap().sorted_rows()
    );
}

fn small_graph() -> impl Strategy<Value = (usize, Vec<(i64, i64)>)> {
    (2usize..24).prop_flat_map(|n| {
        let e = (0..n as i64, 0..n as i64);
        (Just(n), proptest::collection::vec(e, 0..3 * n))
    })
}

fn build(n: usize, edges: &[(i64, i64)], partitions: usize) -> GraphStore {
    let edges: Vec<(i64, i64)> = edges.iter().copied().filter(|(a, b)| a != b).collect();
    let ids: Vec<i64> = (0..n as i64).collect();
    GraphStore::from_edges_and_vertices(
        &edges,
        &ids,
        &LoadOptions::directed(true).with_partitions(partitions),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sssp_matches_dijkstra((n, edges) in small_graph(), source in 0i64..24, p in 1usize..5) {
        let g = build(n, &edges, p);
        let source = source % n as i64;
        prop_assert_eq!(distances(&g, source, &cfg()), hop_oracle(&g, source));
    }

    #[test]
    fn sssp_distances_only_decrease((n, edges) in small_graph()) {
        let g = build(n, &edges, 1);
        let policy = IterationPolicy { update_replace_threshold: usize::MAX, ..IterationPolicy::default() };
        let cfg = policy_cfg(policy, true);
        let out = sssp(&g, 0, &cfg).unwrap();
        let final_d = int_map(&out.table, "id", "d");
        // Each iteration reports only improvements; at least one per step
        // until the last.
        for r in &out.iterations[..out.iterations.len() - 1] {
            prop_assert!(r.updates > 0);
        }
        prop_assert_eq!(out.iterations.last().unwrap().updates, 0);
        prop_assert!(final_d.values().all(|&d| d >= 0));
    }

    #[test]
    fn cc_matches_union_find((n, edges) in small_graph(), alternate in any::<bool>(), full in 0usize..4, p in 1usize..4) {
        let g = build(n, &edges, p);
        let policy = IterationPolicy {
            cc_alternate_direction: alternate,
            cc_full_update_iters: full,
            ..IterationPolicy::default()
        };
        prop_assert_eq!(labels(&g, &policy_cfg(policy, true)), wcc_oracle(g.vertex_ids(), &g.edge_pairs()));
    }

    #[test]
    fn pagerank_matches_power_iteration((n, edges) in small_graph(), k in 1usize..6) {
        let g = build(n, &edges, 2);
        let want = pagerank_oracle(g.vertex_ids(), &g.edge_pairs(), k);
        let got = ranks(&g, k);
        for (v, w) in want {
            prop_assert!((got[&v] - w).abs() < 1e-12, "vertex {} got {} want {}", v, got[&v], w);
        }
    }

    #[test]
    fn apply_delta_modes_agree(values in proptest::collection::vec(-50i64..50, 1..40), picks in proptest::collection::vec((any::<prop::sample::Index>(), -50i64..50), 0..20)) {
        let n = values.len();
        let vertex = ColumnTable::new("vertex", vec![
            Column::new("id", (0..n as i64).map(|i| i * 3).collect::<Vec<_>>()),
            Column::new("value", values),
        ]).unwrap();
        let mut seen = BTreeMap::new();
        for (ix, v) in picks {
            seen.insert(ix.index(n) as i64 * 3, v);
        }
        let delta = ColumnTable::new("d", vec![
            Column::new("id", seen.keys().copied().collect::<Vec<_>>()),
            Column::new("value", seen.values().copied().collect::<Vec<_>>()),
        ]).unwrap();
        let a = apply_delta(&vertex, &delta, ApplyMode::Update).unwrap();
        let b = apply_delta(&vertex, &delta, ApplyMode::Replace).unwrap();
        prop_assert_eq!(a.sorted_rows(), b.sorted_rows());
        let got = int_map(&a, "id", "value");
        for (id, v) in seen {
            prop_assert_eq!(got[&id], v);
        }
    }
}
