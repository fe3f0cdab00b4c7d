// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

use std::collections::BTreeMap;
use std::sync::Arc;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::column::Scalar;
use super::projection::{build_projection, Projection};
use super::table::ColumnTable;
use crate::error::{Error, Result};

/// What a table means to the graph rewrites. Vertex ids are unique and every
/// edge endpoint references one, which is what makes join elimination safe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TableRole {
    Vertex,
    Edge,
    Message,
    Other,
}

/// Key-addressed value patches applied on top of a table at scan time.
#[derive(Debug, Clone)]
pub struct Overlay {
    pub key_column: String,
    pub value_column: String,
    pub values: Arc<FxHashMap<i64, Scalar>>,
}

impl Overlay {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct TableEntry {
    pub table: ColumnTable,
    pub role: TableRole,
    pub projections: Vec<Arc<Projection>>,
    pub overlay: Option<Overlay>,
}

impl TableEntry {
    pub fn projection(&self, name: &str) -> Option<&Arc<Projection>> {
        self.projections.iter().find(|p| p.name == name)
    }

    /// Projection whose rows are sorted on `column` within each partition.
    pub fn sorted_projection(&self, column: &str) -> Option<&Arc<Projection>> {
        self.projections.iter().find(|p| p.is_sorted_on(column))
    }
}

/// Named tables visible to plan execution.
#[derive(Debug, Clone)]
pub struct Catalog {
    partitions: usize,
    tables: BTreeMap<String, TableEntry>,
}

impl Catalog {
    pub fn new(partitions: usize) -> Self {
        Catalog {
            partitions: partitions.max(1),
            tables: BTreeMap::new(),
        }
    }

    pub fn partitions(&self) -> usize {
        self.partitions
    }

    pub fn insert(&mut self, name: impl Into<String>, entry: TableEntry) -> Result<()> {
        let name = name.into();
        for p in &entry.projections {
            if p.partition_count() != self.partitions {
                return Err(Error::schema(format!(
                    "projection {} has {} partitions, catalog uses {}",
                    p.name,
                    p.partition_count(),
                    self.partitions
                )));
            }
        }
        self.tables.insert(name, entry);
        Ok(())
    }

    /// Registers a table with a default projection sorted and segmented on
    /// its first column.
    pub fn register(&mut self, name: &str, table: ColumnTable, role: TableRole) -> Result<()> {
        let key = table
            .columns()
            .first()
            .map(|c| c.name.clone())
            .ok_or_else(|| Error::schema(format!("table {name} has no columns")))?;
        let proj = build_projection(
            format!("{name}_by_{key}"),
            &table,
            &[&key],
            &key,
            self.partitions,
        )?;
        self.insert(
            name,
            TableEntry {
                table,
                role,
                projections: vec![Arc::new(proj)],
                overlay: None,
            },
        )
    }

    pub fn get(&self, name: &str) -> Option<&TableEntry> {
        self.tables.get(name)
    }

    pub fn entry(&self, name: &str) -> Result<&TableEntry> {
        self.get(name)
            .ok_or_else(|| Error::schema(format!("unknown table {name}")))
    }

    pub fn remove(&mut self, name: &str) -> Option<TableEntry> {
        self.tables.remove(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.tables.keys().map(String::as_str)
    }
}
