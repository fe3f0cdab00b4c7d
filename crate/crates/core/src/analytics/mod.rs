// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

//! Neighborhood queries and mixed relational and graph analyses, all run
//! as plans on the executor.

mod metadata;

pub use metadata::{
    float_range, gen_metadata, uniform_cardinality, EDGE_TYPES, FLOAT_COLUMNS, STRING_COLUMNS,
    UNIFORM_INT_COLUMNS, ZIPF_INT_COLUMNS,
};

use crate::error::{Error, Result};
use crate::exec::{execute, ExecOptions};
use crate::expr::{col, lit, param, Expr, Params};
use crate::plan::{join, left_join, scan, AggExpr, AggFunc, Plan};
use crate::storage::{
    Catalog, Column, ColumnTable, GraphStore, Scalar, TableRole, EDGE_TABLE, VERTEX_TABLE,
};

fn run(plan: &Plan, catalog: &Catalog, params: &Params) -> Result<ColumnTable> {
    Ok(execute(plan, catalog, params, &ExecOptions::default())?.table)
}

fn int_param(name: &str, value: i64) -> Params {
    let mut params = Params::default();
    params.insert(name.into(), Scalar::Int(value));
    params
}

/// Keeps the vertices passing `vertex_pred` and the edges passing
/// `edge_pred` whose endpoints both survive. Only `id`, `value`,
/// `from_node` and `to_node` are kept. Predicates use unqualified column
/// names of the vertex and edge tables.
pub fn subgraph_select(
    graph: &GraphStore,
    vertex_pred: &Expr,
    edge_pred: &Expr,
) -> Result<GraphStore> {
    let catalog = graph.catalog();
    let params = Params::default();
    let has_value = graph.vertex.column_index("value").is_some();
    let vertices =
        |alias: &str| scan(VERTEX_TABLE, alias, TableRole::Vertex).filter(vertex_pred.clone());

    let value = if has_value { col("v.value") } else { lit(0.0) };
    let vplan = vertices("v").project(vec![(col("v.id"), "id"), (value, "value")]);
    let eplan = join(
        join(
            scan(EDGE_TABLE, "e", TableRole::Edge).filter(edge_pred.clone()),
            vertices("a"),
            &[("e.from_node", "a.id")],
        ),
        vertices("b"),
        &[("e.to_node", "b.id")],
    )
    .project(vec![
        (col("e.from_node"), "from_node"),
        (col("e.to_node"), "to_node"),
    ]);

    let vertex = run(&vplan, &catalog, &params)?.sort_by(&["id"])?;
    let vertex = if has_value {
        vertex
    } else {
        let n = vertex.row_count();
        vertex
            .select(&["id"])?
            .with_column(Column::new("value", vec![0.0f64; n]))?
    };
    let edge = run(&eplan, &catalog, &params)?.sort_by(&["from_node", "to_node"])?;
    GraphStore::from_tables(vertex, edge, graph.is_directed(), graph.partitions())
}

/// Pairs of sources sharing more than `threshold` out-neighbors, as
/// `(n1, n2, common)` with `n1 < n2`, sorted by pair.
pub fn strong_overlap(graph: &GraphStore, threshold: i64) -> Result<ColumnTable> {
    if threshold < 0 {
        return Err(Error::Domain(format!(
            "threshold must be non-negative, got {threshold}"
        )));
    }
    let plan = join(
        scan(EDGE_TABLE, "e1", TableRole::Edge),
        scan(EDGE_TABLE, "e2", TableRole::Edge),
        &[("e1.to_node", "e2.to_node")],
    )
    .filter(col("e1.from_node").lt(col("e2.from_node")))
    .aggregate(
        &["e1.from_node", "e2.from_node"],
        vec![AggExpr::count_star("common")],
        Some(col("common").gt(param("threshold"))),
    )
    .project(vec![
        (col("e1.from_node"), "n1"),
        (col("e2.from_node"), "n2"),
        (col("common"), "common"),
    ]);
    let out = run(&plan, &graph.catalog(), &int_param("threshold", threshold))?;
    Ok(out.sort_by(&["n1", "n2"])?.with_name("strong_overlap"))
}

/// Vertices with more than `threshold` unordered pairs of neighbors that
/// are not adjacent to each other, as `(id, c)` sorted by id. Needs an
/// undirected graph.
pub fn weak_ties(graph: &GraphStore, threshold: i64) -> Result<ColumnTable> {
    if graph.is_directed() {
        return Err(Error::Precondition(
            "weak ties needs an undirected graph with both edge directions stored".into(),
        ));
    }
    if threshold < 0 {
        return Err(Error::Domain(format!(
            "threshold must be non-negative, got {threshold}"
        )));
    }
    let open_pairs = left_join(
        join(
            scan(EDGE_TABLE, "e1", TableRole::Edge),
            scan(EDGE_TABLE, "e2", TableRole::Edge),
            &[("e1.to_node", "e2.from_node")],
        )
        .filter(col("e1.from_node").not_eq(col("e2.to_node"))),
        scan(EDGE_TABLE, "e3", TableRole::Edge),
        &[
            ("e2.to_node", "e3.from_node"),
            ("e1.from_node", "e3.to_node"),
        ],
    )
    .aggregate(
        &["e1.to_node"],
        vec![AggExpr::new(AggFunc::CountNull, col("e3.to_node"), "open")],
        None,
    )
    .project(vec![(col("e1.to_node"), "id"), (col("open"), "open")]);
    let mut catalog = graph.catalog();
    let params = int_param("threshold", threshold);
    let counts = run(&open_pairs, &catalog, &params)?;
    // Each unordered pair is seen once in each order.
    if let Some(i) = counts.i64_column("open")?.iter().position(|c| c % 2 != 0) {
        return Err(Error::Consistency(format!(
            "vertex {} has an odd ordered-pair count; edges are not symmetric",
            counts.i64_column("id")?[i]
        )));
    }
    catalog.register("open_pairs", counts, TableRole::Other)?;
    let plan = scan("open_pairs", "o", TableRole::Other)
        .project(vec![
            (col("o.id"), "id"),
            (col("o.open").div(lit(2i64)), "c"),
        ])
        .filter(col("c").gt(param("threshold")));
    Ok(run(&plan, &catalog, &params)?
        .sort_by(&["id"])?
        .with_name("weak_ties"))
}

/// Equi-width histogram. Bucket `i` covers `[min + i·w, min + (i+1)·w)`
/// with `w = (max − min) / bucket_count`; the last bucket also holds `max`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bucket_count: usize,
    pub min: f64,
    pub max: f64,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn width(&self) -> f64 {
        (self.max - self.min) / self.bucket_count as f64
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Histogram of the non-null values of `column`. When every value is equal
/// the width is zero and the last bucket holds everything.
pub fn equi_width_histogram(
    table: &ColumnTable,
    column: &str,
    buckets: usize,
) -> Result<Histogram> {
    if buckets == 0 {
        return Err(Error::Domain(
            "a histogram needs at least one bucket".into(),
        ));
    }
    if !table.column(column)?.logical_type().is_numeric() {
        return Err(Error::schema(format!(
            "histogram column {column} must be numeric"
        )));
    }
    let mut catalog = Catalog::new(1);
    catalog.register("input", table.select(&[column])?, TableRole::Other)?;
    let x = || col(&format!("t.{column}"));
    let values = || scan("input", "t", TableRole::Other).filter(x().is_null().not());

    let bounds = values().aggregate(
        &[],
        vec![
            AggExpr::new(AggFunc::Min, x(), "lo"),
            AggExpr::new(AggFunc::Max, x(), "hi"),
            AggExpr::count_star("n"),
        ],
        None,
    );
    let bounds = run(&bounds, &catalog, &Params::default())?;
    let n = bounds.column("n")?.data.scalar(0).as_i64().unwrap_or(0);
    if n == 0 {
        return Err(Error::Domain(format!(
            "histogram input {column} has no values"
        )));
    }
    let lo = bounds
        .column("lo")?
        .data
        .scalar(0)
        .as_f64()
        .expect("non-empty input has a minimum");
    let hi = bounds
        .column("hi")?
        .data
        .scalar(0)
        .as_f64()
        .expect("non-empty input has a maximum");
    if lo == hi {
        let mut counts = vec![0u64; buckets];
        counts[buckets - 1] = n as u64;
        return Ok(Histogram {
            bucket_count: buckets,
            min: lo,
            max: hi,
            counts,
        });
    }

    let mut params = Params::default();
    params.insert("lo".into(), Scalar::Float(lo));
    params.insert("width".into(), Scalar::Float((hi - lo) / buckets as f64));
    params.insert("last".into(), Scalar::Int(buckets as i64 - 1));
    let bucket = Expr::Least(
        Box::new(Expr::Floor(Box::new(
            x().sub(param("lo")).div(param("width")),
        ))),
        Box::new(param("last")),
    );
    let plan = values().project(vec![(bucket, "bucket")]).aggregate(
        &["bucket"],
        vec![AggExpr::count_star("count")],
        None,
    );
    let out = run(&plan, &catalog, &params)?;
    let mut counts = vec![0u64; buckets];
    for (b, c) in out
        .i64_column("bucket")?
        .iter()
        .zip(out.i64_column("count")?)
    {
        counts[*b as usize] += *c as u64;
    }
    Ok(Histogram {
        bucket_count: buckets,
        min: lo,
        max: hi,
        counts,
    })
}

/// Ids whose distance is below `dist_threshold` or whose rank is above
/// `rank_threshold`. Each input is `(id, value)`; an id missing from one
/// input fails only that input's predicate. Sorted by id.
pub fn graph_join(
    ranks: &ColumnTable,
    distances: &ColumnTable,
    rank_threshold: f64,
    dist_threshold: f64,
) -> Result<ColumnTable> {
    let keyed = |t: &ColumnTable, name: &str| -> Result<ColumnTable> {
        if t.columns().len() != 2 || t.columns()[0].name != "id" {
            return Err(Error::schema(format!(
                "{name} must have columns (id, value)"
            )));
        }
        t.rename_columns(&["id", "x"])
    };
    let mut catalog = Catalog::new(1);
    catalog.register("ranks", keyed(ranks, "ranks")?, TableRole::Other)?;
    catalog.register(
        "distances",
        keyed(distances, "distances")?,
        TableRole::Other,
    )?;
    let mut params = Params::default();
    params.insert("rt".into(), Scalar::Float(rank_threshold));
    params.insert("dt".into(), Scalar::Float(dist_threshold));

    let ids = Plan::Union(vec![
        scan("ranks", "ri", TableRole::Other).project(vec![(col("ri.id"), "id")]),
        scan("distances", "di", TableRole::Other).project(vec![(col("di.id"), "id")]),
    ])
    .aggregate(&["id"], vec![AggExpr::count_star("sides")], None);
    let near = Expr::Coalesce(vec![col("d.x").lt(param("dt")), lit(false)]);
    let important = Expr::Coalesce(vec![col("r.x").gt(param("rt")), lit(false)]);
    let plan = left_join(
        left_join(ids, scan("ranks", "r", TableRole::Other), &[("id", "r.id")]),
        scan("distances", "d", TableRole::Other),
        &[("id", "d.id")],
    )
    .filter(near.or(important))
    .project(vec![(col("id"), "id")]);
    Ok(run(&plan, &catalog, &params)?
        .sort_by(&["id"])?
        .with_name("graph_join"))
}
