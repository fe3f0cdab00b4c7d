// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

mod common;

use std::collections::BTreeMap;

use colgraph::algos::{connected_components, pagerank, sssp, AlgoConfig, UNREACHED};
use colgraph::gen::{self, CYCLE2, PATH4};
use colgraph::runtime::*;
use colgraph::storage::{GraphStore, LoadOptions, LogicalType, Scalar};
use colgraph::Error;
use common::*;
use proptest::prelude::*;

fn directed(edges: &[(i64, i64)], partitions: usize) -> GraphStore {
    GraphStore::from_edges(
        edges,
        &LoadOptions::directed(true).with_partitions(partitions),
    )
    .unwrap()
}

fn opts(partitions: usize, workers: usize) -> RuntimeOptions {
    RuntimeOptions {
        partitions,
        workers,
        ..RuntimeOptions::default()
    }
}

fn all_engines(
    g: &GraphStore,
    program: &dyn VertexProgram,
    partitions: usize,
    workers: usize,
) -> [RuntimeOutput; 3] {
    let o = opts(partitions, workers);
    [
        run_reference(g, program, o.max_supersteps).unwrap(),
        run_table_udf(g, program, &o).unwrap(),
        run_shared_memory(g, program, &o).unwrap(),
    ]
}

/// Runs every engine and checks they agree exactly.
fn agreed(
    g: &GraphStore,
    program: &dyn VertexProgram,
    partitions: usize,
    workers: usize,
) -> RuntimeOutput {
    let [reference, udf, shm] = all_engines(g, program, partitions, workers);
    assert_eq!(
        udf.table.rows(),
        reference.table.rows(),
        "table UDF vs reference"
    );
    assert_eq!(
        shm.table.rows(),
        reference.table.rows(),
        "shared memory vs reference"
    );
    let steps = |o: &RuntimeOutput| {
        o.supersteps
            .iter()
            .map(|s| (s.active, s.messages))
            .collect::<Vec<_>>()
    };
    assert_eq!(steps(&udf), steps(&reference));
    assert_eq!(steps(&shm), steps(&reference));
    reference
}

#[test]
fn sssp_program_on_path4() {
    let g = directed(PATH4, 2);
    let out = agreed(
        &g,
        &SsspProgram {
            source: 0,
            weighted: false,
        },
        2,
        2,
    );
    assert_eq!(
        int_map(&out.table, "id", "value"),
        BTreeMap::from([(0, 0), (1, 1), (2, 2), (3, 3)])
    );
}

#[test]
fn pagerank_program_on_cycle2() {
    let out = agreed(
        &directed(CYCLE2, 1),
        &PageRankProgram { iterations: 2 },
        1,
        1,
    );
    assert_eq!(out.supersteps.len(), 3);
    assert_close(
        &float_map(&out.table, "id", "value"),
        &BTreeMap::from([(0, 0.5), (1, 0.5)]),
        0.0,
    );
}

struct HaltAtOnce;

impl VertexProgram for HaltAtOnce {
    fn name(&self) -> &str {
        "halt"
    }
    fn value_type(&self) -> LogicalType {
        LogicalType::Int64
    }
    fn initial_state(&self, id: i64, _: usize) -> Value {
        Value::Int(id * 10)
    }
    fn compute(&self, ctx: &mut Context<'_>) {
        ctx.vote_to_halt();
    }
}

#[test]
fn immediate_halt_runs_one_superstep() {
    let out = agreed(&directed(PATH4, 2), &HaltAtOnce, 2, 3);
    assert_eq!(out.supersteps.len(), 1);
    assert_eq!(
        int_map(&out.table, "id", "value"),
        BTreeMap::from([(0, 0), (1, 10), (2, 20), (3, 30)])
    );
}

/// Sends to a vertex that does not exist.
struct Stray;

impl VertexProgram for Stray {
    fn name(&self) -> &str {
        "stray"
    }
    fn value_type(&self) -> LogicalType {
        LogicalType::Int64
    }
    fn initial_state(&self, _: i64, _: usize) -> Value {
        Value::Int(0)
    }
    fn compute(&self, ctx: &mut Context<'_>) {
        if ctx.superstep() == 1 && ctx.id() == 2 {
            ctx.send(77, Value::Int(1));
        }
        if ctx.superstep() >= 1 {
            ctx.vote_to_halt();
        }
    }
}

#[test]
fn unknown_destination_is_a_runtime_error() {
    let g = directed(PATH4, 2);
    let o = opts(2, 2);
    let results = [
        run_reference(&g, &Stray, 10),
        run_table_udf(&g, &Stray, &o),
        run_shared_memory(&g, &Stray, &o),
    ];
    for r in results {
        match r {
            Err(Error::Runtime {
                superstep, sender, ..
            }) => assert_eq!((superstep, sender), (1, 2)),
            other => panic!("expected runtime error, got {other:?}"),
        }
    }
}

/// Records the order in which messages arrive: sums sender ids weighted by
/// position, which only matches if every engine sorts inbound messages.
struct OrderProbe;

impl VertexProgram for OrderProbe {
    fn name(&self) -> &str {
        "order"
    }
    fn value_type(&self) -> LogicalType {
        LogicalType::Int64
    }
    fn initial_state(&self, _: i64, _: usize) -> Value {
        Value::Int(0)
    }
    fn compute(&self, ctx: &mut Context<'_>) {
        match ctx.superstep() {
            0 => {
                for (k, &t) in ctx.out_edges().to_vec().iter().enumerate() {
                    ctx.send(t, Value::Int(3 - k as i64));
                    ctx.send(t, Value::Int(k as i64));
                }
            }
            _ => {
                let mut sorted = true;
                let msgs = ctx.messages();
                for w in msgs.windows(2) {
                    sorted &= (w[0].sender, w[0].value) <= (w[1].sender, w[1].value);
                }
                let fingerprint: i64 = msgs
                    .iter()
                    .enumerate()
                    .map(|(i, m)| (i as i64 + 1) * (m.sender * 7 + m.value.as_i64()))
                    .sum();
                ctx.value = Value::Int(if sorted { fingerprint } else { -1 });
                ctx.vote_to_halt();
            }
        }
    }
}

#[test]
fn inbound_messages_arrive_sorted() {
    let g = gen::gnp(40, 0.2, true, 9, 3).unwrap();
    for (p, w) in [(1, 1), (3, 2), (8, 8)] {
        let out = agreed(&g, &OrderProbe, p, w);
        assert!(int_map(&out.table, "id", "value").values().all(|&v| v >= 0));
    }
}

#[test]
fn shared_memory_writes_nothing() {
    let g = gen::gnp(100, 0.05, true, 2, 2).unwrap();
    let [_, udf, shm] = all_engines(&g, &PageRankProgram { iterations: 5 }, 2, 2);
    assert_eq!(shm.bytes_written(), 0);
    assert!(shm
        .supersteps
        .iter()
        .all(|s| s.bytes_written == 0 && s.bytes_read == 0));
    assert!(udf.supersteps.iter().all(|s| s.bytes_written > 0));
}

#[test]
fn spilled_tables_give_same_result() {
    let g = gen::gnp(60, 0.06, true, 4, 2).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let program = CcProgram;
    let spilled = RuntimeOptions {
        spill_dir: Some(dir.path().to_path_buf()),
        ..opts(2, 1)
    };
    let a = run_table_udf(&g, &program, &spilled).unwrap();
    let b = run_table_udf(&g, &program, &opts(2, 1)).unwrap();
    assert_eq!(a.table.rows(), b.table.rows());
    assert!(std::fs::read_dir(dir.path()).unwrap().count() > 0);
}

#[test]
fn memory_budget_is_enforced() {
    let g = gen::gnp(50, 0.1, true, 1, 1).unwrap();
    let tight = RuntimeOptions {
        memory_budget: Some(1024),
        ..opts(1, 1)
    };
    match run_shared_memory(&g, &CcProgram, &tight) {
        Err(Error::Resource(msg)) => assert!(msg.contains("table-UDF")),
        other => panic!("expected resource error, got {other:?}"),
    }
    assert!(estimate_shared_bytes(&g) > 1024);
}

#[test]
fn sssp_program_on_256_vertices_matches_dijkstra() {
    let g = gen::gnp(256, 0.02, true, 17, 4).unwrap();
    let want = dijkstra_oracle(
        g.vertex_ids(),
        &g.edge_pairs()
            .iter()
            .map(|&(a, b)| (a, b, 1.0))
            .collect::<Vec<_>>(),
        0,
    );
    for workers in [1, 2, 8] {
        let out = run_shared_memory(
            &g,
            &SsspProgram {
                source: 0,
                weighted: false,
            },
            &opts(4, workers),
        )
        .unwrap();
        for (v, d) in int_map(&out.table, "id", "value") {
            assert_eq!(
                d,
                want.get(&v).map_or(UNREACHED, |&x| x as i64),
                "vertex {v}"
            );
        }
    }
}

#[test]
fn weighted_sssp_program_matches_dijkstra() {
    let edges = gen::gnp_edges(80, 0.05, true, 23);
    let weighted = gen::weighted(&edges, 5, 24);
    let g =
        GraphStore::from_weighted_edges(&weighted, &LoadOptions::directed(true).with_partitions(2))
            .unwrap();
    let source = g.vertex_ids()[0];
    let want = dijkstra_oracle(g.vertex_ids(), &weighted, source);
    let out = agreed(
        &g,
        &SsspProgram {
            source,
            weighted: true,
        },
        2,
        2,
    );
    for (v, d) in float_map(&out.table, "id", "value") {
        assert_eq!(
            d,
            want.get(&v).copied().unwrap_or(f64::INFINITY),
            "vertex {v}"
        );
    }
}

#[test]
fn registry_builds_programs_by_name() {
    let r = ProgramRegistry::default();
    assert_eq!(
        r.names().collect::<Vec<_>>(),
        vec!["cc", "pagerank", "sssp"]
    );
    let args = ProgramArgs {
        source: Some(0),
        iterations: Some(3),
        weighted: false,
    };
    assert_eq!(r.create("sssp", &args).unwrap().name(), "sssp");
    assert!(matches!(
        r.create("sssp", &ProgramArgs::default()),
        Err(Error::Domain(_))
    ));
    assert!(matches!(r.create("nope", &args), Err(Error::Domain(_))));
    let mut r = r;
    r.register("halt", |_| {
        Ok(std::sync::Arc::new(HaltAtOnce) as std::sync::Arc<dyn VertexProgram>)
    });
    assert_eq!(r.create("halt", &args).unwrap().name(), "halt");
}

fn sql_equivalence(g: &GraphStore) {
    let cfg = AlgoConfig::default();
    let o = opts(g.partitions(), 2);

    let sql = int_map(&sssp(g, 0, &cfg).unwrap().table, "id", "d");
    for out in [
        run_table_udf(
            g,
            &SsspProgram {
                source: 0,
                weighted: false,
            },
            &o,
        )
        .unwrap(),
        run_shared_memory(
            g,
            &SsspProgram {
                source: 0,
                weighted: false,
            },
            &o,
        )
        .unwrap(),
    ] {
        assert_eq!(int_map(&out.table, "id", "value"), sql);
    }

    let sql = int_map(
        &connected_components(g, &cfg).unwrap().table,
        "id",
        "component",
    );
    for out in [
        run_table_udf(g, &CcProgram, &o).unwrap(),
        run_shared_memory(g, &CcProgram, &o).unwrap(),
    ] {
        assert_eq!(int_map(&out.table, "id", "value"), sql);
    }

    let sql = float_map(&pagerank(g, 6, &cfg).unwrap().table, "id", "rank");
    let program = PageRankProgram { iterations: 6 };
    for out in [
        run_table_udf(g, &program, &o).unwrap(),
        run_shared_memory(g, &program, &o).unwrap(),
    ] {
        assert_close(&float_map(&out.table, "id", "value"), &sql, 1e-12);
    }
}

#[test]
fn programs_match_sql_algorithms() {
    for seed in 0..4 {
        sql_equivalence(&gen::gnp(64, 0.05, true, seed, 1 + seed as usize % 3).unwrap());
    }
}

#[test]
fn value_round_trips_through_scalar() {
    for v in [Value::Int(-3), Value::Float(2.5)] {
        assert_eq!(Value::from_scalar(&v.to_scalar()), Some(v));
    }
    assert_eq!(Value::from_scalar(&Scalar::Null), None);
    assert!(Value::Int(i64::MAX) < Value::Float(f64::NEG_INFINITY));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn engines_agree_on_random_graphs(n in 2usize..48, p in 0.0f64..0.2, seed in any::<u64>(), parts in 1usize..5, workers in 1usize..5) {
        let g = gen::gnp(n, p, true, seed, parts).unwrap();
        let programs: Vec<Box<dyn VertexProgram>> = vec![
            Box::new(SsspProgram { source: seed as i64 % n as i64, weighted: false }),
            Box::new(CcProgram),
            Box::new(PageRankProgram { iterations: 4 }),
        ];
        for program in &programs {
            agreed(&g, program.as_ref(), parts, workers);
        }
    }
}
