// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

use std::sync::Arc;

use super::column::{Column, ColumnData, LogicalType, Scalar};
use crate::error::{Error, Result};

/// Immutable columnar table. "Updates" build a new table or go through an
/// overlay; the columns themselves are never written after construction.
#[derive(Debug, Clone)]
pub struct ColumnTable {
    name: String,
    columns: Vec<Column>,
    row_count: usize,
}

impl ColumnTable {
    pub fn new(name: impl Into<String>, columns: Vec<Column>) -> Result<Self> {
        let name = name.into();
        let row_count = columns.first().map_or(0, Column::len);
        for col in &columns {
            if col.len() != row_count {
                return Err(Error::schema(format!(
                    "table {name}: column {} has {} rows, expected {row_count}",
                    col.name,
                    col.len()
                )));
            }
        }
        for (i, col) in columns.iter().enumerate() {
            if columns[..i].iter().any(|c| c.name == col.name) {
                return Err(Error::schema(format!(
                    "table {name}: duplicate column {}",
                    col.name
                )));
            }
        }
        Ok(ColumnTable {
            name,
            columns,
            row_count,
        })
    }

    pub fn empty(name: impl Into<String>, schema: &[(&str, LogicalType)]) -> Self {
        let columns = schema
            .iter()
            .map(|(n, ty)| Column::new(*n, ColumnData::from(super::ColumnValues::empty(*ty))))
            .collect();
        ColumnTable {
            name: name.into(),
            columns,
            row_count: 0,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    pub fn is_empty(&self) -> bool {
        self.row_count == 0
    }

    pub fn schema(&self) -> Vec<(String, LogicalType)> {
        self.columns
            .iter()
            .map(|c| (c.name.clone(), c.logical_type()))
            .collect()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn column(&self, name: &str) -> Result<&Column> {
        self.column_index(name)
            .map(|i| &self.columns[i])
            .ok_or_else(|| Error::schema(format!("table {}: unknown column {name}", self.name)))
    }

    pub fn i64_column(&self, name: &str) -> Result<&[i64]> {
        let col = self.column(name)?;
        col.data.as_i64().ok_or_else(|| {
            Error::schema(format!(
                "column {name} is {}, expected int64",
                col.logical_type()
            ))
        })
    }

    pub fn f64_column(&self, name: &str) -> Result<&[f64]> {
        let col = self.column(name)?;
        col.data.as_f64().ok_or_else(|| {
            Error::schema(format!(
                "column {name} is {}, expected float64",
                col.logical_type()
            ))
        })
    }

    pub fn row(&self, i: usize) -> Vec<Scalar> {
        self.columns.iter().map(|c| c.data.scalar(i)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.row_count).map(|i| self.row(i)).collect()
    }

    /// Rows in sorted order; the canonical form for multiset comparisons.
    pub fn sorted_rows(&self) -> Vec<Vec<Scalar>> {
        let mut rows = self.rows();
        rows.sort();
        rows
    }

    /// Reorders rows by `indices` (which may also drop or repeat rows).
    pub fn take(&self, indices: &[u32]) -> ColumnTable {
        let columns = self
            .columns
            .iter()
            .map(|c| Column {
                name: c.name.clone(),
                data: Arc::new(c.data.take(indices)),
                encoding: c.encoding,
            })
            .collect();
        ColumnTable {
            name: self.name.clone(),
            columns,
            row_count: indices.len(),
        }
    }

    pub fn select(&self, names: &[&str]) -> Result<ColumnTable> {
        let columns = names
            .iter()
            .map(|n| self.column(n).cloned())
            .collect::<Result<Vec<_>>>()?;
        ColumnTable::new(self.name.clone(), columns)
    }

    pub fn rename_columns(&self, names: &[&str]) -> Result<ColumnTable> {
        if names.len() != self.columns.len() {
            return Err(Error::schema("rename: column count mismatch"));
        }
        let columns = self
            .columns
            .iter()
            .zip(names)
            .map(|(c, n)| Column {
                name: n.to_string(),
                ..c.clone()
            })
            .collect();
        ColumnTable::new(self.name.clone(), columns)
    }

    pub fn with_column(&self, column: Column) -> Result<ColumnTable> {
        let mut columns = self.columns.clone();
        match self.column_index(&column.name) {
            Some(i) => columns[i] = column,
            None => columns.push(column),
        }
        ColumnTable::new(self.name.clone(), columns)
    }

    /// Sum of decoded column sizes, as seen by the byte counters.
    pub fn byte_size(&self) -> usize {
        self.columns.iter().map(|c| c.data.byte_size()).sum()
    }

    /// Stable sort of rows by the named columns.
    pub fn sort_by(&self, keys: &[&str]) -> Result<ColumnTable> {
        let cols = keys
            .iter()
            .map(|k| self.column(k).map(|c| c.data.clone()))
            .collect::<Result<Vec<_>>>()?;
        let mut idx: Vec<u32> = (0..self.row_count as u32).collect();
        if let [single] = cols.as_slice() {
            if let (Some(v), None) = (single.as_i64(), &single.validity) {
                idx.sort_by_key(|&i| v[i as usize]);
                return Ok(self.take(&idx));
            }
        }
        idx.sort_by(|&a, &b| {
            cols.iter()
                .map(|c| c.scalar(a as usize).cmp(&c.scalar(b as usize)))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        Ok(self.take(&idx))
    }
}

/// Logical equality: same schema and same row multiset.
impl PartialEq for ColumnTable {
    fn eq(&self, other: &Self) -> bool {
        self.schema() == other.schema() && self.sorted_rows() == other.sorted_rows()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ragged_columns() {
        let err = ColumnTable::new(
            "t",
            vec![
                Column::new("a", vec![1i64, 2]),
                Column::new("b", vec![1i64]),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Schema(_)));
    }

    #[test]
    fn equality_ignores_row_order() {
        let a = ColumnTable::new("t", vec![Column::new("a", vec![1i64, 2])]).unwrap();
        let b = ColumnTable::new("u", vec![Column::new("a", vec![2i64, 1])]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sort_by_multiple_keys() {
        let t = ColumnTable::new(
            "t",
            vec![
                Column::new("a", vec![2i64, 1, 2]),
                Column::new("b", vec![1.0, 9.0, 0.5]),
            ],
        )
        .unwrap();
        let s = t.sort_by(&["a", "b"]).unwrap();
        assert_eq!(s.f64_column("b").unwrap(), &[9.0, 0.5, 1.0]);
    }
}
