// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

use std::sync::Arc;

use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{execute, ExecOptions, ExecReport};
use crate::expr::{col, Expr, Params};
use crate::plan::{left_join, scan, BuildSide, JoinMethod};
use crate::storage::{
    build_projection, Catalog, Column, ColumnData, ColumnTable, ColumnValues, Overlay, Projection,
    Scalar, TableEntry, TableRole, VERTEX_BY_ID,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ApplyMode {
    /// Patch values through an overlay on the existing table.
    Update,
    /// Build a new vertex table.
    Replace,
}

impl ApplyMode {
    pub fn for_updates(updates: usize, threshold: usize) -> ApplyMode {
        if updates < threshold {
            ApplyMode::Update
        } else {
            ApplyMode::Replace
        }
    }
}

fn id_value(delta: &ColumnTable) -> Result<(&[i64], &ColumnData)> {
    Ok((
        delta.i64_column("id")?,
        delta.column("value")?.data.as_ref(),
    ))
}

fn check_subset(vertex: &ColumnTable, delta: &ColumnTable) -> Result<()> {
    let ids = vertex.i64_column("id")?;
    let sorted = ids.windows(2).all(|w| w[0] < w[1]);
    let known: Option<rustc_hash::FxHashSet<i64>> =
        (!sorted).then(|| ids.iter().copied().collect());
    for &d in delta.i64_column("id")? {
        let present = match &known {
            Some(set) => set.contains(&d),
            None => ids.binary_search(&d).is_ok(),
        };
        if !present {
            return Err(Error::Consistency(format!(
                "delta vertex {d} is not in the vertex table"
            )));
        }
    }
    Ok(())
}

/// Left-outer-join coalesce: the new table takes the delta value where one
/// exists and the old value elsewhere.
fn replace_plan(vertex: &ColumnTable) -> crate::plan::Plan {
    let exprs: Vec<(Expr, &str)> = vertex
        .columns()
        .iter()
        .map(|c| {
            let e = if c.name == "value" {
                Expr::Coalesce(vec![col("d.value"), col("v.value")])
            } else {
                col(&format!("v.{}", c.name))
            };
            (e, c.name.as_str())
        })
        .collect();
    left_join(
        scan("v", "v", TableRole::Vertex),
        scan("d", "d", TableRole::Other),
        &[("v.id", "d.id")],
    )
    .with_method(JoinMethod::Hash {
        build: BuildSide::Right,
    })
    .project(exprs)
}

/// Applies `delta` (id, value) to `vertex`. Both modes give the same
/// logical table; replace goes through the executor, update patches values.
pub fn apply_delta(
    vertex: &ColumnTable,
    delta: &ColumnTable,
    mode: ApplyMode,
) -> Result<ColumnTable> {
    apply_delta_with(vertex, delta, mode, &ExecOptions::default()).map(|(t, _)| t)
}

pub(crate) fn apply_delta_with(
    vertex: &ColumnTable,
    delta: &ColumnTable,
    mode: ApplyMode,
    opts: &ExecOptions,
) -> Result<(ColumnTable, Option<ExecReport>)> {
    check_subset(vertex, delta)?;
    if delta.is_empty() {
        return Ok((vertex.clone(), None));
    }
    match mode {
        ApplyMode::Replace => {
            let mut catalog = Catalog::new(1);
            catalog.register("v", vertex.clone(), TableRole::Vertex)?;
            catalog.register("d", delta.clone(), TableRole::Other)?;
            let r = execute(&replace_plan(vertex), &catalog, &Params::default(), opts)?;
            let mut report = r.report;
            report.bytes_written += r.table.byte_size() as u64;
            Ok((r.table.with_name(vertex.name()), Some(report)))
        }
        ApplyMode::Update => {
            let patches: FxHashMap<i64, Scalar> = {
                let (ids, values) = id_value(delta)?;
                ids.iter()
                    .enumerate()
                    .map(|(i, &id)| (id, values.scalar(i)))
                    .collect()
            };
            Ok((patch(vertex, &patches)?, None))
        }
    }
}

fn patch(vertex: &ColumnTable, patches: &FxHashMap<i64, Scalar>) -> Result<ColumnTable> {
    let ids = vertex.i64_column("id")?;
    let old = &vertex.column("value")?.data;
    let mut values = ColumnValues::with_capacity(old.logical_type(), ids.len());
    let mut valid = Vec::with_capacity(ids.len());
    for (i, id) in ids.iter().enumerate() {
        let s = patches.get(id).cloned().unwrap_or_else(|| old.scalar(i));
        valid.push(!s.is_null());
        values.push_scalar(&s)?;
    }
    let validity = valid
        .iter()
        .any(|v| !v)
        .then(|| crate::storage::Bitmap::from_bools(valid));
    vertex.with_column(Column::new("value", ColumnData::new(values, validity)))
}

/// The evolving vertex table of an iterative run: a base table with its
/// id projection plus in-place patches applied through a scan overlay.
#[derive(Debug, Clone)]
pub struct VertexState {
    table: ColumnTable,
    projection: Arc<Projection>,
    overlay: Arc<FxHashMap<i64, Scalar>>,
    partitions: usize,
}

impl VertexState {
    pub fn new(table: ColumnTable, partitions: usize) -> Result<Self> {
        let projection = Arc::new(build_projection(
            VERTEX_BY_ID,
            &table,
            &["id"],
            "id",
            partitions,
        )?);
        Ok(VertexState {
            table,
            projection,
            overlay: Arc::default(),
            partitions,
        })
    }

    pub fn entry(&self) -> TableEntry {
        TableEntry {
            table: self.table.clone(),
            role: TableRole::Vertex,
            projections: vec![self.projection.clone()],
            overlay: (!self.overlay.is_empty()).then(|| Overlay {
                key_column: "id".into(),
                value_column: "value".into(),
                values: self.overlay.clone(),
            }),
        }
    }

    pub fn overlay_len(&self) -> usize {
        self.overlay.len()
    }

    /// Applies a delta and returns the executor report of a replace.
    pub fn apply(
        &mut self,
        delta: &ColumnTable,
        mode: ApplyMode,
        opts: &ExecOptions,
    ) -> Result<Option<ExecReport>> {
        match mode {
            ApplyMode::Update => {
                check_subset(&self.table, delta)?;
                let (ids, values) = id_value(delta)?;
                let overlay = Arc::make_mut(&mut self.overlay);
                for (i, &id) in ids.iter().enumerate() {
                    overlay.insert(id, values.scalar(i));
                }
                Ok(None)
            }
            ApplyMode::Replace => {
                let base = self.materialize()?;
                let (table, report) = apply_delta_with(&base, delta, ApplyMode::Replace, opts)?;
                *self = VertexState::new(table, self.partitions)?;
                Ok(report)
            }
        }
    }

    /// Replaces the whole table, clearing any overlay.
    pub fn reset(&mut self, table: ColumnTable) -> Result<()> {
        *self = VertexState::new(table, self.partitions)?;
        Ok(())
    }

    /// The logical vertex table with all patches applied.
    pub fn materialize(&self) -> Result<ColumnTable> {
        if self.overlay.is_empty() {
            Ok(self.table.clone())
        } else {
            patch(&self.table, &self.overlay)
        }
    }

    /// Current value of `id`, if present.
    pub fn value(&self, id: i64) -> Option<Scalar> {
        if let Some(v) = self.overlay.get(&id) {
            return Some(v.clone());
        }
        let ids = self.table.i64_column("id").ok()?;
        let i = ids.binary_search(&id).ok()?;
        Some(self.table.column("value").ok()?.data.scalar(i))
    }
}
