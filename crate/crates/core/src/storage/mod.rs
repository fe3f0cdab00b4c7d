// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

//! Columnar tables, encodings, projections and graph ingestion.

mod catalog;
mod column;
pub mod encoding;
mod graph;
pub mod persist;
mod projection;
mod table;

pub use catalog::{Catalog, Overlay, TableEntry, TableRole};
pub use column::{Bitmap, Column, ColumnData, ColumnValues, Encoding, LogicalType, Scalar};
pub use encoding::{best_encoding, decode_column, encode_column, EncodedColumn, EncodedValues};
pub use graph::{
    default_partitions, load_edge_list, load_edge_list_with, load_vertex_metadata, parse_edge_list,
    GraphStore, LoadOptions, EDGES_BY_FROM, EDGES_BY_TO, EDGE_TABLE, VERTEX_BY_ID, VERTEX_TABLE,
};
pub use projection::{
    build_projection, hash_scalar, mix64, partition_assignment, partition_of_i64, Projection,
};
pub use table::ColumnTable;
