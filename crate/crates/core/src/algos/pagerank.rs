// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

use web_time::Instant;

use super::{compile_iteration, AlgoConfig, AlgoOutput, ApplyMode, IterationRecord, VertexState};
use crate::error::{Error, Result};
use crate::exec::execute;
use crate::expr::{col, lit, param, Expr, Params};
use crate::plan::{
    join, left_join, scan, AggExpr, AggFunc, BuildSide, JoinMethod, Plan, VertexComputeKind,
    OUTBOUND_TABLE, PAGERANK_TELEPORT,
};
use crate::storage::{
    Catalog, Column, ColumnTable, GraphStore, LogicalType, Scalar, TableRole, EDGE_TABLE,
    VERTEX_TABLE,
};

/// Table holding the ranks produced by the current iteration.
const NEW_RANKS: &str = "v_new";

/// The three plans of one PageRank iteration.
#[derive(Debug, Clone)]
pub struct PageRankPlans {
    /// Each vertex's rank divided by its out-degree; vertices without
    /// out-edges are absent.
    pub outbound: Plan,
    /// Rank contributions summed per receiving vertex.
    pub iteration: Plan,
    /// The next vertex table: vertices that received nothing keep only the
    /// teleport term.
    pub replace: Plan,
}

pub fn pagerank_plans(catalog: &Catalog) -> Result<PageRankPlans> {
    let outbound = join(
        scan(VERTEX_TABLE, "v", TableRole::Vertex),
        scan(EDGE_TABLE, "e", TableRole::Edge),
        &[("v.id", "e.from_node")],
    )
    .aggregate(
        &["v.id", "v.value"],
        vec![AggExpr::new(AggFunc::Count, col("e.to_node"), "cnt")],
        None,
    )
    .project(vec![
        (col("v.id"), "id"),
        (col("v.value").div(col("cnt")), "value"),
    ]);
    let replace = left_join(
        scan(VERTEX_TABLE, "v", TableRole::Vertex),
        scan(NEW_RANKS, "p", TableRole::Other),
        &[("v.id", "p.id")],
    )
    .with_method(JoinMethod::Hash {
        build: BuildSide::Right,
    })
    .project(vec![
        (col("v.id"), "id"),
        (
            Expr::Coalesce(vec![col("p.value"), lit(PAGERANK_TELEPORT).div(param("n"))]),
            "value",
        ),
    ]);
    Ok(PageRankPlans {
        outbound,
        iteration: compile_iteration(VertexComputeKind::PageRank, OUTBOUND_TABLE, catalog)?,
        replace,
    })
}

/// Fixed-iteration PageRank starting from the uniform distribution.
pub fn pagerank(graph: &GraphStore, iterations: usize, cfg: &AlgoConfig) -> Result<AlgoOutput> {
    let n = graph.n();
    if n == 0 {
        return Err(Error::Domain("PageRank needs at least one vertex".into()));
    }
    let ids = graph.vertex_ids().to_vec();
    let initial = ColumnTable::new(
        VERTEX_TABLE,
        vec![
            Column::new("id", ids),
            Column::new("value", vec![1.0 / n as f64; n]),
        ],
    )?;
    let mut state = VertexState::new(initial, graph.partitions())?;
    let mut catalog = graph.catalog();
    let mut params = Params::default();
    params.insert("n".into(), Scalar::Int(n as i64));
    catalog.insert(VERTEX_TABLE, state.entry())?;
    catalog.register(
        OUTBOUND_TABLE,
        ColumnTable::empty(
            OUTBOUND_TABLE,
            &[("id", LogicalType::Int64), ("value", LogicalType::Float64)],
        ),
        TableRole::Vertex,
    )?;
    let plans = pagerank_plans(&catalog)?;
    let mut records = Vec::with_capacity(iterations);

    for iteration in 1..=iterations {
        let started = Instant::now();
        let mut record = IterationRecord::new(iteration);
        record.mode = ApplyMode::Replace;
        catalog.insert(VERTEX_TABLE, state.entry())?;

        let outbound = execute(&plans.outbound, &catalog, &params, &cfg.exec)?;
        record.absorb(&outbound.report);
        catalog.register(OUTBOUND_TABLE, outbound.table, TableRole::Vertex)?;

        let ranks = execute(&plans.iteration, &catalog, &params, &cfg.exec)?;
        record.absorb(&ranks.report);
        record.updates = ranks.table.row_count();
        catalog.register(NEW_RANKS, ranks.table, TableRole::Other)?;

        let next = execute(&plans.replace, &catalog, &params, &cfg.exec)?;
        record.absorb(&next.report);
        record.bytes_written += next.table.byte_size() as u64;
        state.reset(next.table.with_name(VERTEX_TABLE))?;

        record.wall = started.elapsed();
        records.push(record);
    }
    let table = state
        .materialize()?
        .rename_columns(&["id", "rank"])?
        .with_name("pagerank");
    Ok(AlgoOutput {
        table,
        iterations: records,
    })
}
