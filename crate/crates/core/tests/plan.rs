// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

mod common;

use colgraph::plan::*;
use colgraph::storage::{
    Catalog, GraphStore, LoadOptions, TableEntry, TableRole, EDGE_TABLE, VERTEX_TABLE,
};
use colgraph::Error;
use common::soundness::{check_soundness, kinds, stages, SSSP};
use proptest::prelude::*;

fn path4_catalog(partitions: usize) -> Catalog {
    let g = GraphStore::from_edges(
        &[(0, 1), (1, 2), (2, 3)],
        &LoadOptions::directed(true).with_partitions(partitions),
    )
    .unwrap();
    let mut c = g.catalog();
    c.register(OUTBOUND_TABLE, g.vertex.clone(), TableRole::Vertex)
        .unwrap();
    c
}

fn compiled(kind: VertexComputeKind, catalog: &Catalog) -> Plan {
    choose_physical(stages(kind).last().unwrap(), catalog).unwrap()
}

const SSSP_COMPILED: &str = "\
Project [v1.id AS id, new_value AS value]
  GroupByAgg keys=[v1.id, v1.value] aggs=[MIN((v2.value + 1)) AS new_value] having (new_value < v1.value)
    MergeJoin e.to_node = v1.id
      HashJoin[build=left, sip] v2.id = e.from_node
        Scan vertex AS v2
        Scan edge AS e via edges_by_to
      Scan vertex AS v1 via vertex_by_id
";

const CC_COMPILED: &str = "\
Project [v1.id AS id, new_value AS value]
  GroupByAgg keys=[v1.id, v1.value] aggs=[MIN(v2.value) AS new_value] having (new_value < v1.value)
    MergeJoin e.to_node = v1.id
      HashJoin[build=left, sip] v2.id = e.from_node
        Scan vertex AS v2
        Scan edge AS e via edges_by_to
      Scan vertex AS v1 via vertex_by_id
";

const PAGERANK_COMPILED: &str = "\
Project [e.to_node AS id, ((0.15 / :n) + (0.85 * rank_sum)) AS value]
  GroupByAgg keys=[e.to_node] aggs=[SUM(v2.value) AS rank_sum]
    HashJoin[build=left, sip] v2.id = e.from_node
      Scan v_outbound AS v2
      Scan edge AS e via edges_by_to
";

const SSSP_VERTEX_CENTRIC: &str = "\
VertexCompute sssp vertex=(v1.id, v1.value) message=m.value emits M'
  Join m.dst = v1.id
    Scan message AS m
    Scan vertex AS v1
  Scan edge AS e
";

const SSSP_NO_MESSAGES: &str = "\
VertexCompute sssp vertex=(v1.id, v1.value) message=(v2.value + 1)
  Join e.to_node = v1.id
    Join v2.id = e.from_node
      Scan vertex AS v2
      Scan edge AS e
    Scan vertex AS v1
";

fn golden(plan: &Plan, want: &str) {
    assert_eq!(format!("{plan}").trim_end(), want.trim_end());
}

#[test]
fn golden_compiled_plans() {
    for p in [1, 2] {
        let c = path4_catalog(p);
        golden(&compiled(SSSP, &c), SSSP_COMPILED);
        golden(&compiled(VertexComputeKind::Cc, &c), CC_COMPILED);
        golden(
            &compiled(VertexComputeKind::PageRank, &c),
            PAGERANK_COMPILED,
        );
    }
}

#[test]
fn golden_intermediate_stages() {
    let s = stages(SSSP);
    golden(&s[0], SSSP_VERTEX_CENTRIC);
    golden(&s[1], SSSP_NO_MESSAGES);
}

#[test]
fn join_elimination_only_applies_to_pagerank() {
    let s = stages(VertexComputeKind::PageRank);
    assert_eq!(s[2].count_joins(), 2);
    assert_eq!(s[3].count_joins(), 1);
    for kind in [SSSP, VertexComputeKind::Cc] {
        let s = stages(kind);
        assert_eq!(s[3], s[2]);
    }
}

#[test]
fn join_count_never_grows_after_message_elimination() {
    for kind in kinds() {
        let counts: Vec<usize> = stages(kind.clone())[1..]
            .iter()
            .map(Plan::count_joins)
            .collect();
        assert!(
            counts.windows(2).all(|w| w[1] <= w[0]),
            "{kind:?}: {counts:?}"
        );
    }
}

#[test]
fn rewrites_are_idempotent() {
    let c = path4_catalog(2);
    for kind in kinds() {
        let s = stages(kind);
        assert_eq!(eliminate_message_table(&s[1]).unwrap(), s[1]);
        assert_eq!(lower_vertex_compute(&s[2]).unwrap(), s[2]);
        assert_eq!(eliminate_redundant_join(&s[3]), s[3]);
        let phys = choose_physical(&s[3], &c).unwrap();
        assert_eq!(choose_physical(&phys, &c).unwrap(), phys);
    }
}

#[test]
fn structure_mutation_blocks_message_elimination() {
    let mut plan = build_vertex_centric_plan(SSSP);
    if let Plan::VertexCompute(v) = &mut plan {
        v.mutates_structure = true;
    }
    assert!(matches!(
        eliminate_message_table(&plan),
        Err(Error::RewriteInapplicable(_))
    ));
}

#[test]
fn lowering_needs_message_elimination_first() {
    let plan = build_vertex_centric_plan(SSSP);
    assert!(matches!(
        lower_vertex_compute(&plan),
        Err(Error::RewriteInapplicable(_))
    ));
}

#[test]
fn opaque_programs_cannot_be_lowered() {
    let plan = eliminate_message_table(&build_vertex_centric_plan(VertexComputeKind::Opaque(
        "custom".into(),
    )))
    .unwrap();
    assert!(matches!(
        lower_vertex_compute(&plan),
        Err(Error::LoweringUnsupported(_))
    ));
}

#[test]
fn missing_projections_give_hash_joins() {
    let g = GraphStore::from_edges(
        &[(0, 1), (1, 2), (2, 3)],
        &LoadOptions::directed(true).with_partitions(1),
    )
    .unwrap();
    let mut c = Catalog::new(1);
    for (name, table, role) in [
        (VERTEX_TABLE, g.vertex.clone(), TableRole::Vertex),
        (EDGE_TABLE, g.edge.clone(), TableRole::Edge),
        (OUTBOUND_TABLE, g.vertex.clone(), TableRole::Vertex),
    ] {
        let entry = TableEntry {
            table,
            role,
            projections: vec![],
            overlay: None,
        };
        c.insert(name, entry).unwrap();
    }
    for kind in kinds() {
        let printed = compiled(kind, &c).to_string();
        assert!(!printed.contains("MergeJoin"), "{printed}");
        assert!(printed.contains("HashJoin"), "{printed}");
    }
}

#[test]
fn reverse_edges_swaps_endpoints() {
    let s = stages(VertexComputeKind::Cc);
    let r = reverse_edges(&s[2], "e");
    let printed = r.to_string();
    assert!(printed.contains("Join v2.id = e.to_node"), "{printed}");
    assert!(printed.contains("Join e.from_node = v1.id"), "{printed}");
    assert_eq!(reverse_edges(&r, "e"), s[2]);
}

#[test]
fn rewrite_soundness_on_path4() {
    for kind in kinds() {
        check_soundness(kind, 4, 0.5, 1, 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rewrites_preserve_results(n in 2usize..33, p in 0.0f64..0.3, seed in any::<u64>(), partitions in 1usize..5) {
        for kind in kinds() {
            check_soundness(kind, n, p, seed, partitions);
        }
    }
}
