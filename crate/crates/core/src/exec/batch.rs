// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

use std::fmt;
use std::sync::atomic::{AtomicIsize, AtomicUsize, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::storage::{Column, ColumnData, ColumnTable, LogicalType};

pub const DEFAULT_BATCH_SIZE: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field {
    pub name: String,
    pub ty: LogicalType,
}

/// Ordered, named column types of a row stream.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Schema {
    pub fields: Vec<Field>,
}

impl Schema {
    pub fn new(fields: impl IntoIterator<Item = (String, LogicalType)>) -> Self {
        Schema {
            fields: fields
                .into_iter()
                .map(|(name, ty)| Field { name, ty })
                .collect(),
        }
    }

    pub fn of_table(table: &ColumnTable) -> Self {
        Schema::new(table.schema())
    }

    /// Schema of a table scanned under `alias`: every column becomes `alias.col`.
    pub fn qualified(table: &ColumnTable, alias: &str) -> Self {
        Schema::new(
            table
                .schema()
                .into_iter()
                .map(|(n, ty)| (format!("{alias}.{n}"), ty)),
        )
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.fields.iter().map(|f| f.name.as_str())
    }

    /// Resolves a column reference: exact match first, then a unique match on
    /// the unqualified suffix (`id` finds `v1.id` if no other `*.id` exists).
    pub fn index_of(&self, name: &str) -> Option<usize> {
        if let Some(i) = self.fields.iter().position(|f| f.name == name) {
            return Some(i);
        }
        if name.contains('.') {
            return None;
        }
        let mut hits = self
            .fields
            .iter()
            .enumerate()
            .filter(|(_, f)| f.name.rsplit('.').next() == Some(name));
        match (hits.next(), hits.next()) {
            (Some((i, _)), None) => Some(i),
            _ => None,
        }
    }

    pub fn resolve(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::schema(format!("unresolved column {name}")))
    }

    pub fn field(&self, i: usize) -> &Field {
        &self.fields[i]
    }

    pub fn concat(&self, other: &Schema) -> Schema {
        Schema {
            fields: self.fields.iter().chain(&other.fields).cloned().collect(),
        }
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .fields
            .iter()
            .map(|fl| format!("{}:{}", fl.name, fl.ty))
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Counts rows held by live batches, with a high-water mark.
#[derive(Debug, Default)]
pub struct RowTracker {
    live: AtomicIsize,
    peak: AtomicUsize,
}

impl RowTracker {
    pub fn peak(&self) -> usize {
        self.peak.load(Ordering::Relaxed)
    }

    pub fn live(&self) -> isize {
        self.live.load(Ordering::Relaxed)
    }

    fn add(&self, rows: usize) {
        let now = self.live.fetch_add(rows as isize, Ordering::Relaxed) + rows as isize;
        self.peak.fetch_max(now.max(0) as usize, Ordering::Relaxed);
    }

    fn sub(&self, rows: usize) {
        self.live.fetch_sub(rows as isize, Ordering::Relaxed);
    }
}

#[derive(Debug)]
struct RowGuard {
    rows: usize,
    tracker: Arc<RowTracker>,
}

impl Drop for RowGuard {
    fn drop(&mut self) {
        self.tracker.sub(self.rows);
    }
}

/// A slice of a row stream: equal-length columns sharing one schema.
#[derive(Debug, Clone)]
pub struct Batch {
    pub schema: Arc<Schema>,
    pub columns: Vec<Arc<ColumnData>>,
    len: usize,
    guard: Option<Arc<RowGuard>>,
}

impl Batch {
    pub fn new(schema: Arc<Schema>, columns: Vec<Arc<ColumnData>>) -> Self {
        let len = columns.first().map_or(0, |c| c.len());
        debug_assert!(columns.iter().all(|c| c.len() == len));
        debug_assert_eq!(columns.len(), schema.len());
        Batch {
            schema,
            columns,
            len,
            guard: None,
        }
    }

    /// Registers the batch's rows with `tracker` until the batch (and all
    /// clones) are dropped.
    pub fn tracked(mut self, tracker: Option<&Arc<RowTracker>>) -> Self {
        if let Some(t) = tracker {
            t.add(self.len);
            self.guard = Some(Arc::new(RowGuard {
                rows: self.len,
                tracker: t.clone(),
            }));
        }
        self
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn column(&self, i: usize) -> &Arc<ColumnData> {
        &self.columns[i]
    }

    pub fn take(&self, indices: &[u32]) -> Batch {
        Batch::new(
            self.schema.clone(),
            self.columns
                .iter()
                .map(|c| Arc::new(c.take(indices)))
                .collect(),
        )
    }

    pub fn filter(&self, mask: &[bool]) -> Batch {
        Batch::new(
            self.schema.clone(),
            self.columns
                .iter()
                .map(|c| Arc::new(c.filter(mask)))
                .collect(),
        )
    }

    pub fn slice(&self, start: usize, end: usize) -> Batch {
        Batch::new(
            self.schema.clone(),
            self.columns
                .iter()
                .map(|c| Arc::new(c.slice(start, end)))
                .collect(),
        )
    }

    pub fn from_table(table: &ColumnTable, schema: Arc<Schema>) -> Batch {
        Batch::new(
            schema,
            table.columns().iter().map(|c| c.data.clone()).collect(),
        )
    }

    /// Concatenates batches of one schema.
    pub fn concat(schema: Arc<Schema>, batches: &[Batch]) -> Result<Batch> {
        if batches.len() == 1 {
            let mut b = batches[0].clone().detached();
            b.schema = schema;
            return Ok(b);
        }
        let columns = (0..schema.len())
            .map(|i| {
                let parts: Vec<&ColumnData> =
                    batches.iter().map(|b| b.columns[i].as_ref()).collect();
                ColumnData::concat(schema.field(i).ty, &parts).map(Arc::new)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Batch::new(schema, columns))
    }

    pub fn with_schema(mut self, schema: Arc<Schema>) -> Batch {
        debug_assert_eq!(schema.len(), self.columns.len());
        self.schema = schema;
        self
    }

    /// The same rows, no longer counted as in flight.
    pub fn detached(mut self) -> Batch {
        self.guard = None;
        self
    }

    pub fn into_table(self, name: &str) -> Result<ColumnTable> {
        let columns = self
            .schema
            .fields
            .iter()
            .zip(self.columns)
            .map(|(f, data)| Column {
                name: f.name.clone(),
                data,
                encoding: crate::storage::Encoding::Plain,
            })
            .collect();
        ColumnTable::new(name, columns)
    }
}

/// Empty column set for a schema.
pub fn empty_columns(schema: &Schema) -> Vec<Arc<ColumnData>> {
    schema
        .fields
        .iter()
        .map(|f| Arc::new(ColumnData::from(crate::storage::ColumnValues::empty(f.ty))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suffix_resolution_requires_uniqueness() {
        let s = Schema::new([
            ("v1.id".to_string(), LogicalType::Int64),
            ("v2.id".to_string(), LogicalType::Int64),
            ("e.to_node".to_string(), LogicalType::Int64),
        ]);
        assert_eq!(s.index_of("v2.id"), Some(1));
        assert_eq!(s.index_of("to_node"), Some(2));
        assert_eq!(s.index_of("id"), None);
        assert_eq!(s.index_of("x.to_node"), None);
    }

    #[test]
    fn tracker_counts_live_rows() {
        let t = Arc::new(RowTracker::default());
        let s = Arc::new(Schema::new([("a".to_string(), LogicalType::Int64)]));
        let b = Batch::new(
            s.clone(),
            vec![Arc::new(ColumnData::from(vec![1i64, 2, 3]))],
        )
        .tracked(Some(&t));
        let c = b.clone();
        assert_eq!(t.live(), 3);
        drop(b);
        assert_eq!(t.live(), 3);
        drop(c);
        assert_eq!(t.live(), 0);
        assert_eq!(t.peak(), 3);
    }
}
