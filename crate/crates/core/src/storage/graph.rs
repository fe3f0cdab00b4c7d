// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use rustc_hash::FxHashMap;

use super::catalog::{Catalog, TableEntry, TableRole};
use super::column::{Column, ColumnData, Encoding, LogicalType, Scalar};
use super::projection::{build_projection, Projection};
use super::table::ColumnTable;
use crate::error::{Error, Result};

pub const VERTEX_TABLE: &str = "vertex";
pub const EDGE_TABLE: &str = "edge";
pub const VERTEX_BY_ID: &str = "vertex_by_id";
pub const EDGES_BY_FROM: &str = "edges_by_from";
pub const EDGES_BY_TO: &str = "edges_by_to";

pub fn default_partitions() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[derive(Debug, Clone)]
pub struct LoadOptions {
    pub directed: bool,
    pub partitions: usize,
    /// Collapse repeated `(src, dst)` pairs into one edge.
    pub dedup: bool,
}

impl LoadOptions {
    pub fn directed(directed: bool) -> Self {
        LoadOptions {
            directed,
            partitions: default_partitions(),
            dedup: true,
        }
    }

    pub fn with_partitions(mut self, partitions: usize) -> Self {
        self.partitions = partitions.max(1);
        self
    }
}

/// Vertex and edge tables plus their physical projections.
#[derive(Debug, Clone)]
pub struct GraphStore {
    pub vertex: ColumnTable,
    pub edge: ColumnTable,
    pub projections: BTreeMap<String, Arc<Projection>>,
    directed: bool,
    partitions: usize,
}

impl GraphStore {
    /// Validates the graph invariants and builds the default projections.
    pub fn from_tables(
        vertex: ColumnTable,
        edge: ColumnTable,
        directed: bool,
        partitions: usize,
    ) -> Result<Self> {
        let partitions = partitions.max(1);
        let ids = vertex.i64_column("id")?;
        let mut sorted: Vec<i64> = ids.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Consistency("vertex ids are not unique".into()));
        }
        let from = edge.i64_column("from_node")?;
        let to = edge.i64_column("to_node")?;
        for (&a, &b) in from.iter().zip(to) {
            for v in [a, b] {
                if sorted.binary_search(&v).is_err() {
                    return Err(Error::Consistency(format!(
                        "edge endpoint {v} is not a vertex"
                    )));
                }
            }
        }
        if !directed {
            let mut fwd: Vec<(i64, i64)> = from.iter().copied().zip(to.iter().copied()).collect();
            let mut rev: Vec<(i64, i64)> = fwd.iter().map(|&(a, b)| (b, a)).collect();
            fwd.sort_unstable();
            rev.sort_unstable();
            if fwd != rev {
                return Err(Error::Consistency(
                    "undirected graph is missing reverse edges".into(),
                ));
            }
        }
        let mut store = GraphStore {
            vertex: vertex.with_name(VERTEX_TABLE),
            edge: edge.with_name(EDGE_TABLE),
            projections: BTreeMap::new(),
            directed,
            partitions,
        };
        store.rebuild_projections()?;
        Ok(store)
    }

    /// Builds a graph from an edge list. Undirected inputs get both directions.
    pub fn from_edges(edges: &[(i64, i64)], options: &LoadOptions) -> Result<Self> {
        Self::from_edge_list(edges, None, &[], options)
    }

    /// Like [`GraphStore::from_edges`], plus extra vertices that may have no edges.
    pub fn from_edges_and_vertices(
        edges: &[(i64, i64)],
        isolated: &[i64],
        options: &LoadOptions,
    ) -> Result<Self> {
        Self::from_edge_list(edges, None, isolated, options)
    }

    pub fn from_weighted_edges(edges: &[(i64, i64, f64)], options: &LoadOptions) -> Result<Self> {
        let pairs: Vec<(i64, i64)> = edges.iter().map(|e| (e.0, e.1)).collect();
        let weights: Vec<f64> = edges.iter().map(|e| e.2).collect();
        Self::from_edge_list(&pairs, Some(&weights), &[], options)
    }

    fn from_edge_list(
        edges: &[(i64, i64)],
        weights: Option<&[f64]>,
        isolated: &[i64],
        options: &LoadOptions,
    ) -> Result<Self> {
        if edges.is_empty() && isolated.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let mut rows: Vec<(i64, i64, f64)> = edges
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| (a, b, weights.map_or(1.0, |w| w[i])))
            .collect();
        if !options.directed {
            let rev: Vec<_> = rows
                .iter()
                .filter(|r| r.0 != r.1)
                .map(|&(a, b, w)| (b, a, w))
                .collect();
            rows.extend(rev);
        }
        rows.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)).then(x.2.total_cmp(&y.2)));
        if options.dedup {
            rows.dedup_by_key(|r| (r.0, r.1));
        }

        let mut ids: Vec<i64> = rows.iter().flat_map(|r| [r.0, r.1]).collect();
        ids.extend_from_slice(isolated);
        ids.sort_unstable();
        ids.dedup();

        let n = ids.len();
        let vertex = ColumnTable::new(
            VERTEX_TABLE,
            vec![
                Column::new("id", ids).with_encoding(Encoding::Delta),
                Column::new("value", vec![0.0f64; n]),
            ],
        )?;
        let mut edge_cols = vec![
            Column::new("from_node", rows.iter().map(|r| r.0).collect::<Vec<_>>())
                .with_encoding(Encoding::RunLength),
            Column::new("to_node", rows.iter().map(|r| r.1).collect::<Vec<_>>())
                .with_encoding(Encoding::Dictionary),
        ];
        if weights.is_some() {
            edge_cols.push(Column::new(
                "weight",
                rows.iter().map(|r| r.2).collect::<Vec<_>>(),
            ));
        }
        let edge = ColumnTable::new(EDGE_TABLE, edge_cols)?;
        // Construction already guarantees the invariants; skip re-validation.
        let mut store = GraphStore {
            vertex,
            edge,
            projections: BTreeMap::new(),
            directed: options.directed,
            partitions: options.partitions.max(1),
        };
        store.rebuild_projections()?;
        Ok(store)
    }

    pub fn rebuild_projections(&mut self) -> Result<()> {
        let p = self.partitions;
        let projections = [
            build_projection(VERTEX_BY_ID, &self.vertex, &["id"], "id", p)?,
            build_projection(
                EDGES_BY_FROM,
                &self.edge,
                &["from_node", "to_node"],
                "from_node",
                p,
            )?,
            build_projection(
                EDGES_BY_TO,
                &self.edge,
                &["to_node", "from_node"],
                "to_node",
                p,
            )?,
        ];
        self.projections = projections
            .into_iter()
            .map(|proj| (proj.name.clone(), Arc::new(proj)))
            .collect();
        Ok(())
    }

    pub fn with_partitions(&self, partitions: usize) -> Result<Self> {
        let mut out = self.clone();
        out.partitions = partitions.max(1);
        out.rebuild_projections()?;
        Ok(out)
    }

    /// Replaces the vertex table (same ids required) and rebuilds projections.
    pub fn with_vertex_table(&self, vertex: ColumnTable) -> Result<Self> {
        GraphStore::from_tables(vertex, self.edge.clone(), self.directed, self.partitions)
    }

    pub fn with_tables(&self, vertex: ColumnTable, edge: ColumnTable) -> Result<Self> {
        GraphStore::from_tables(vertex, edge, self.directed, self.partitions)
    }

    /// Assembles a store from already-built parts (used when reopening a
    /// persisted store).
    pub(crate) fn from_parts(
        vertex: ColumnTable,
        edge: ColumnTable,
        projections: BTreeMap<String, Arc<Projection>>,
        directed: bool,
        partitions: usize,
    ) -> Self {
        GraphStore {
            vertex,
            edge,
            projections,
            directed,
            partitions,
        }
    }

    pub fn n(&self) -> usize {
        self.vertex.row_count()
    }

    pub fn edge_count(&self) -> usize {
        self.edge.row_count()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn partitions(&self) -> usize {
        self.partitions
    }

    pub fn vertex_ids(&self) -> &[i64] {
        self.vertex.i64_column("id").expect("vertex table has id")
    }

    pub fn edge_pairs(&self) -> Vec<(i64, i64)> {
        let from = self
            .edge
            .i64_column("from_node")
            .expect("edge table has from_node");
        let to = self
            .edge
            .i64_column("to_node")
            .expect("edge table has to_node");
        from.iter().copied().zip(to.iter().copied()).collect()
    }

    pub fn has_weights(&self) -> bool {
        self.edge.column_index("weight").is_some()
    }

    /// Catalog exposing `vertex` and `edge` with their projections.
    pub fn catalog(&self) -> Catalog {
        let mut cat = Catalog::new(self.partitions);
        let vertex_proj = self
            .projections
            .get(VERTEX_BY_ID)
            .cloned()
            .into_iter()
            .collect();
        let edge_proj = [EDGES_BY_FROM, EDGES_BY_TO]
            .iter()
            .filter_map(|n| self.projections.get(*n).cloned())
            .collect();
        cat.insert(
            VERTEX_TABLE,
            TableEntry {
                table: self.vertex.clone(),
                role: TableRole::Vertex,
                projections: vertex_proj,
                overlay: None,
            },
        )
        .expect("partition counts agree");
        cat.insert(
            EDGE_TABLE,
            TableEntry {
                table: self.edge.clone(),
                role: TableRole::Edge,
                projections: edge_proj,
                overlay: None,
            },
        )
        .expect("partition counts agree");
        cat
    }
}

/// Parses SNAP edge-list text: whitespace-separated `src dst [weight]`
/// lines, `#` comments, blank lines ignored.
pub fn parse_edge_list(text: &str, options: &LoadOptions) -> Result<GraphStore> {
    let mut edges = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    let mut weighted = false;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let ingest = |message: String| Error::Ingest {
            line: lineno + 1,
            message,
        };
        let mut tokens = line.split_ascii_whitespace();
        let mut next_id = |what: &str| -> Result<i64> {
            let tok = tokens
                .next()
                .ok_or_else(|| ingest(format!("missing {what} vertex")))?;
            tok.parse::<i64>()
                .map_err(|_| ingest(format!("invalid {what} vertex id {tok:?}")))
        };
        let src = next_id("source")?;
        let dst = next_id("destination")?;
        let weight = match tokens.next() {
            Some(tok) => {
                weighted = true;
                tok.parse::<f64>()
                    .map_err(|_| ingest(format!("invalid edge weight {tok:?}")))?
            }
            None => 1.0,
        };
        if let Some(extra) = tokens.next() {
            return Err(ingest(format!("unexpected trailing token {extra:?}")));
        }
        edges.push((src, dst));
        weights.push(weight);
    }
    if edges.is_empty() {
        return Err(Error::EmptyGraph);
    }
    GraphStore::from_edge_list(&edges, weighted.then_some(&weights[..]), &[], options)
}

pub fn load_edge_list(path: impl AsRef<Path>, directed: bool) -> Result<GraphStore> {
    load_edge_list_with(path, &LoadOptions::directed(directed))
}

pub fn load_edge_list_with(path: impl AsRef<Path>, options: &LoadOptions) -> Result<GraphStore> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    parse_edge_list(&text, options)
}

/// Joins a CSV of vertex attributes (header required, first column `id`)
/// onto the vertex table. Column types are inferred: int64, then float64,
/// then string. Vertices absent from the file get nulls.
pub fn load_vertex_metadata(graph: &GraphStore, text: &str) -> Result<GraphStore> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let csv_error = |e: csv::Error| Error::Ingest {
        line: e.position().map_or(1, |p| p.line() as usize),
        message: e.to_string(),
    };
    let names: Vec<String> = reader
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(str::to_string)
        .collect();
    if names.first().map(String::as_str) != Some("id") {
        return Err(Error::Ingest {
            line: 1,
            message: "first metadata column must be \"id\"".into(),
        });
    }
    let mut raw: Vec<Vec<String>> = vec![Vec::new(); names.len() - 1];
    let mut row_of: FxHashMap<i64, usize> = FxHashMap::default();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let id = record[0].parse::<i64>().map_err(|_| Error::Ingest {
            line,
            message: format!("invalid vertex id {:?}", &record[0]),
        })?;
        row_of.insert(id, raw.first().map_or(row_of.len(), Vec::len));
        for (col, field) in raw.iter_mut().zip(record.iter().skip(1)) {
            col.push(field.to_string());
        }
    }
    let vertex_ids = graph.vertex_ids();
    let mut vertex = graph.vertex.clone();
    for (name, values) in names[1..].iter().zip(&raw) {
        let ty = if values.iter().all(|v| v.parse::<i64>().is_ok()) {
            LogicalType::Int64
        } else if values.iter().all(|v| v.parse::<f64>().is_ok()) {
            LogicalType::Float64
        } else {
            LogicalType::Utf8
        };
        let scalars: Vec<Scalar> = vertex_ids
            .iter()
            .map(|id| match row_of.get(id) {
                None => Scalar::Null,
                Some(&r) => match ty {
                    LogicalType::Int64 => Scalar::Int(values[r].parse().unwrap()),
                    LogicalType::Float64 => Scalar::Float(values[r].parse().unwrap()),
                    _ => Scalar::str(&values[r]),
                },
            })
            .collect();
        let data = ColumnData::from_scalars(ty, &scalars)?;
        vertex = vertex.with_column(Column::new(name.as_str(), data))?;
    }
    graph.with_vertex_table(vertex)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(directed: bool) -> LoadOptions {
        LoadOptions::directed(directed).with_partitions(2)
    }

    #[test]
    fn path4_directed() {
        let g = parse_edge_list("0 1\n1 2\n2 3", &opts(true)).unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.vertex_ids(), &[0, 1, 2, 3]);
    }

    #[test]
    fn undirected_adds_reverse() {
        let g = parse_edge_list("0 1", &opts(false)).unwrap();
        assert_eq!(g.edge_pairs(), vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn comments_and_blank_lines_skipped() {
        let g = parse_edge_list("# header\n\n0\t1\n  # c\n1 2\n", &opts(true)).unwrap();
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = parse_edge_list("a b", &opts(true)).unwrap_err();
        assert!(matches!(err, Error::Ingest { line: 1, .. }), "{err}");
        let err = parse_edge_list("0 1\n# x\n2", &opts(true)).unwrap_err();
        assert!(matches!(err, Error::Ingest { line: 3, .. }), "{err}");
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(
            parse_edge_list("# only comments\n", &opts(true)),
            Err(Error::EmptyGraph)
        ));
    }

    #[test]
    fn duplicate_edges_collapse() {
        let g = parse_edge_list("0 1\n0 1\n1 0", &opts(false)).unwrap();
        assert_eq!(g.edge_pairs(), vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn third_column_is_a_weight() {
        let g = parse_edge_list("0 1 2.5\n1 2", &opts(true)).unwrap();
        assert_eq!(g.edge.f64_column("weight").unwrap(), &[2.5, 1.0]);
    }

    #[test]
    fn default_projections_exist() {
        let g = parse_edge_list("0 1\n1 2\n2 3", &opts(true)).unwrap();
        let by_to = &g.projections[EDGES_BY_TO];
        assert_eq!(by_to.partition_count(), 2);
        assert_eq!(by_to.table, g.edge);
        assert!(g.projections.contains_key(EDGES_BY_FROM));
        assert!(g.projections.contains_key(VERTEX_BY_ID));
    }

    #[test]
    fn from_tables_checks_endpoints() {
        let v = ColumnTable::new("v", vec![Column::new("id", vec![0i64])]).unwrap();
        let e = ColumnTable::new(
            "e",
            vec![
                Column::new("from_node", vec![0i64]),
                Column::new("to_node", vec![5i64]),
            ],
        )
        .unwrap();
        assert!(matches!(
            GraphStore::from_tables(v, e, true, 1),
            Err(Error::Consistency(_))
        ));
    }

    #[test]
    fn metadata_csv_joins_on_id() {
        let g = parse_edge_list("0 1\n1 2", &opts(true)).unwrap();
        let g = load_vertex_metadata(&g, "id,age,name\n0,31,ann\n2,40,bob\n").unwrap();
        let age = g.vertex.column("age").unwrap();
        assert_eq!(age.data.scalar(0), Scalar::Int(31));
        assert!(age.data.is_null(1));
        assert_eq!(
            g.vertex.column("name").unwrap().logical_type(),
            LogicalType::Utf8
        );
    }
}
