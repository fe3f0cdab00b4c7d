// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

//! On-disk store layout.
//!
//! A store is a directory holding `manifest.json` plus one file per column.
//! Each column file is framed as:
//!
//! ```text
//! magic    b"CGCOL"            5 bytes
//! version  u8                  currently 1
//! type     u8                  0 int64, 1 float64, 2 utf8, 3 boolean
//! encoding u8                  0 plain, 1 run_length, 2 dictionary, 3 delta
//! rows     varint
//! nulls    u8                  0 = no bitmap, 1 = bitmap of ceil(rows/64) LE u64 words follows
//! payload  see `storage::encoding`
//! ```
//!
//! Table files used for spilled intermediate results concatenate the same
//! frames after a `b"CGTAB"` magic, a version byte, a varint column count and
//! length-prefixed column names.

use std::collections::BTreeMap;
use std::fs;
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::column::{Bitmap, Column, Encoding, LogicalType};
use super::encoding::{best_encoding, encode_column, read_varint, write_varint, EncodedColumn};
use super::graph::{GraphStore, EDGE_TABLE, VERTEX_TABLE};
use super::projection::Projection;
use super::table::ColumnTable;
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u8 = 1;
const COLUMN_MAGIC: &[u8; 5] = b"CGCOL";
const TABLE_MAGIC: &[u8; 5] = b"CGTAB";
pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnMeta {
    pub name: String,
    pub logical_type: LogicalType,
    pub encoding: Encoding,
    pub file: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableMeta {
    pub name: String,
    pub row_count: usize,
    pub columns: Vec<ColumnMeta>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionMeta {
    pub name: String,
    pub base: String,
    pub sort_key: Vec<String>,
    pub segmentation_key: String,
    pub partitions: Vec<Range<usize>>,
    pub table: TableMeta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u8,
    pub name: String,
    pub directed: bool,
    pub partitions: usize,
    pub vertex: TableMeta,
    pub edge: TableMeta,
    pub projections: Vec<ProjectionMeta>,
}

impl Manifest {
    /// Total bytes of all column files.
    pub fn disk_bytes(&self) -> u64 {
        let table = |t: &TableMeta| t.columns.iter().map(|c| c.bytes).sum::<u64>();
        table(&self.vertex)
            + table(&self.edge)
            + self
                .projections
                .iter()
                .map(|p| table(&p.table))
                .sum::<u64>()
    }
}

fn type_code(ty: LogicalType) -> u8 {
    match ty {
        LogicalType::Int64 => 0,
        LogicalType::Float64 => 1,
        LogicalType::Utf8 => 2,
        LogicalType::Boolean => 3,
    }
}

fn type_from_code(code: u8) -> Result<LogicalType, String> {
    Ok(match code {
        0 => LogicalType::Int64,
        1 => LogicalType::Float64,
        2 => LogicalType::Utf8,
        3 => LogicalType::Boolean,
        _ => return Err(format!("unknown type code {code}")),
    })
}

fn encoding_code(e: Encoding) -> u8 {
    match e {
        Encoding::Plain => 0,
        Encoding::RunLength => 1,
        Encoding::Dictionary => 2,
        Encoding::Delta => 3,
    }
}

fn encoding_from_code(code: u8) -> Result<Encoding, String> {
    Ok(match code {
        0 => Encoding::Plain,
        1 => Encoding::RunLength,
        2 => Encoding::Dictionary,
        3 => Encoding::Delta,
        _ => return Err(format!("unknown encoding code {code}")),
    })
}

/// Appends one framed column.
pub fn write_column_frame(encoded: &EncodedColumn, out: &mut Vec<u8>) {
    out.extend_from_slice(COLUMN_MAGIC);
    out.push(FORMAT_VERSION);
    out.push(type_code(encoded.logical_type));
    out.push(encoding_code(encoded.encoding()));
    write_varint(encoded.row_count as u64, out);
    match &encoded.validity {
        None => out.push(0),
        Some(bits) => {
            out.push(1);
            for w in bits.as_words() {
                out.extend_from_slice(&w.to_le_bytes());
            }
        }
    }
    encoded.write_payload(out);
}

fn take<'a>(input: &mut &'a [u8], n: usize) -> Result<&'a [u8], String> {
    if input.len() < n {
        return Err("unexpected end of file".into());
    }
    let (head, rest) = input.split_at(n);
    *input = rest;
    Ok(head)
}

/// Reads one framed column.
pub fn read_column_frame(name: &str, input: &mut &[u8]) -> Result<EncodedColumn, String> {
    if take(input, 5)? != COLUMN_MAGIC {
        return Err("bad column magic".into());
    }
    let header = take(input, 3)?;
    if header[0] != FORMAT_VERSION {
        return Err(format!("unsupported format version {}", header[0]));
    }
    let ty = type_from_code(header[1])?;
    let encoding = encoding_from_code(header[2])?;
    let rows = read_varint(input)? as usize;
    let validity = match take(input, 1)?[0] {
        0 => None,
        1 => {
            let words = take(input, rows.div_ceil(64) * 8)?
                .chunks_exact(8)
                .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
                .collect();
            Some(Bitmap::from_words(words, rows))
        }
        other => return Err(format!("bad null flag {other}")),
    };
    EncodedColumn::read_payload(name, ty, encoding, rows, validity, input)
}

/// Serializes a table, each column in its own encoding.
pub fn encode_table(table: &ColumnTable) -> Vec<u8> {
    let mut out = Vec::with_capacity(table.byte_size() / 2 + 16);
    out.extend_from_slice(TABLE_MAGIC);
    out.push(FORMAT_VERSION);
    write_varint(table.columns().len() as u64, &mut out);
    for col in table.columns() {
        write_varint(col.name.len() as u64, &mut out);
        out.extend_from_slice(col.name.as_bytes());
    }
    for col in table.columns() {
        let encoded = encode_column(col, col.encoding)
            .or_else(|_| encode_column(col, Encoding::Plain))
            .expect("plain applies to every type");
        write_column_frame(&encoded, &mut out);
    }
    out
}

pub fn decode_table(name: &str, mut input: &[u8]) -> Result<ColumnTable, String> {
    let input = &mut input;
    if take(input, 5)? != TABLE_MAGIC {
        return Err("bad table magic".into());
    }
    if take(input, 1)?[0] != FORMAT_VERSION {
        return Err("unsupported format version".into());
    }
    let ncols = read_varint(input)? as usize;
    let mut names = Vec::with_capacity(ncols);
    for _ in 0..ncols {
        let len = read_varint(input)? as usize;
        let bytes = take(input, len)?;
        names.push(String::from_utf8(bytes.to_vec()).map_err(|e| e.to_string())?);
    }
    let columns = names
        .iter()
        .map(|n| read_column_frame(n, input).map(|e| e.decode()))
        .collect::<Result<Vec<_>, String>>()?;
    ColumnTable::new(name, columns).map_err(|e| e.to_string())
}

fn write_table(dir: &Path, prefix: &str, table: &ColumnTable) -> Result<TableMeta> {
    let mut columns = Vec::new();
    for (i, col) in table.columns().iter().enumerate() {
        let encoding = best_encoding(col);
        let encoded = encode_column(col, encoding)?;
        let mut buf = Vec::new();
        write_column_frame(&encoded, &mut buf);
        let file = format!("{prefix}.{i}.col");
        let path = dir.join(&file);
        fs::write(&path, &buf).map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
        columns.push(ColumnMeta {
            name: col.name.clone(),
            logical_type: col.logical_type(),
            encoding,
            file,
            bytes: buf.len() as u64,
        });
    }
    Ok(TableMeta {
        name: table.name().to_string(),
        row_count: table.row_count(),
        columns,
    })
}

fn read_table(dir: &Path, meta: &TableMeta) -> Result<ColumnTable> {
    let mut columns: Vec<Column> = Vec::new();
    for cm in &meta.columns {
        let path = dir.join(&cm.file);
        let bytes =
            fs::read(&path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        let format_err = |message: String| Error::Format {
            path: path.clone(),
            message,
        };
        let encoded = read_column_frame(&cm.name, &mut bytes.as_slice()).map_err(format_err)?;
        if encoded.logical_type != cm.logical_type || encoded.row_count != meta.row_count {
            return Err(format_err("column header disagrees with manifest".into()));
        }
        columns.push(encoded.decode());
    }
    ColumnTable::new(meta.name.clone(), columns)
}

/// Writes `graph` under `dir` (created if missing) and returns the manifest.
pub fn save_store(graph: &GraphStore, name: &str, dir: &Path) -> Result<Manifest> {
    fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
    let vertex = write_table(dir, VERTEX_TABLE, &graph.vertex)?;
    let edge = write_table(dir, EDGE_TABLE, &graph.edge)?;
    let mut projections = Vec::new();
    for proj in graph.projections.values() {
        projections.push(ProjectionMeta {
            name: proj.name.clone(),
            base: proj.base.clone(),
            sort_key: proj.sort_key.clone(),
            segmentation_key: proj.segmentation_key.clone(),
            partitions: proj.partitions.clone(),
            table: write_table(dir, &proj.name, &proj.table)?,
        });
    }
    let manifest = Manifest {
        format_version: FORMAT_VERSION,
        name: name.to_string(),
        directed: graph.is_directed(),
        partitions: graph.partitions(),
        vertex,
        edge,
        projections,
    };
    let path = dir.join(MANIFEST);
    let json = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, json).map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
    Ok(manifest)
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join(MANIFEST);
    let bytes = fs::read(&path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    let manifest: Manifest = serde_json::from_slice(&bytes).map_err(|e| Error::Format {
        path: path.clone(),
        message: e.to_string(),
    })?;
    if manifest.format_version != FORMAT_VERSION {
        return Err(Error::Format {
            path,
            message: format!("unsupported format version {}", manifest.format_version),
        });
    }
    Ok(manifest)
}

/// Reopens a store written by [`save_store`].
pub fn open_store(dir: &Path) -> Result<(GraphStore, Manifest)> {
    let manifest = read_manifest(dir)?;
    let vertex = read_table(dir, &manifest.vertex)?;
    let edge = read_table(dir, &manifest.edge)?;
    let mut projections = BTreeMap::new();
    for pm in &manifest.projections {
        let table = read_table(dir, &pm.table)?;
        projections.insert(
            pm.name.clone(),
            Arc::new(Projection {
                name: pm.name.clone(),
                base: pm.base.clone(),
                sort_key: pm.sort_key.clone(),
                segmentation_key: pm.segmentation_key.clone(),
                partitions: pm.partitions.clone(),
                table,
            }),
        );
    }
    let graph = GraphStore::from_parts(
        vertex,
        edge,
        projections,
        manifest.directed,
        manifest.partitions,
    );
    Ok((graph, manifest))
}

/// Directory of the named store under `root`.
pub fn store_dir(root: &Path, name: &str) -> PathBuf {
    root.join(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::storage::{parse_edge_list, LoadOptions, Scalar};

    #[test]
    fn table_bytes_round_trip() {
        let t = ColumnTable::new(
            "t",
            vec![
                Column::new("a", vec![3i64, 3, 4]).with_encoding(Encoding::RunLength),
                Column::new("b", vec!["x", "y", "x"]).with_encoding(Encoding::Dictionary),
                Column::new(
                    "c",
                    crate::storage::ColumnData::from_scalars(
                        LogicalType::Float64,
                        &[Scalar::Float(1.5), Scalar::Null, Scalar::Float(-2.0)],
                    )
                    .unwrap(),
                ),
            ],
        )
        .unwrap();
        let back = decode_table("t", &encode_table(&t)).unwrap();
        assert_eq!(back.rows(), t.rows());
    }

    #[test]
    fn store_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = parse_edge_list(
            "0 1\n1 2\n2 3",
            &LoadOptions::directed(true).with_partitions(2),
        )
        .unwrap();
        let m = save_store(&g, "path4", dir.path()).unwrap();
        assert!(m.disk_bytes() > 0);
        let (back, m2) = open_store(dir.path()).unwrap();
        assert_eq!(m, m2);
        assert_eq!(back.vertex.rows(), g.vertex.rows());
        assert_eq!(back.edge.rows(), g.edge.rows());
        assert_eq!(back.projections.len(), 3);
        assert_eq!(back.partitions(), 2);
    }

    #[test]
    fn corrupt_column_is_a_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let g = parse_edge_list("0 1", &LoadOptions::directed(true)).unwrap();
        let m = save_store(&g, "g", dir.path()).unwrap();
        fs::write(dir.path().join(&m.edge.columns[0].file), b"junk").unwrap();
        assert!(matches!(open_store(dir.path()), Err(Error::Format { .. })));
    }
}
