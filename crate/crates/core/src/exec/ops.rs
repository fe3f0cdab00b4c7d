// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

//! Per-partition pull operators.

use std::collections::VecDeque;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use web_time::Instant;

use super::batch::{Batch, RowTracker, Schema};
use super::keys::{HashIndex, Keys, SipFilter};
use crate::error::{Error, Result};
use crate::expr::{Expr, Params};
use crate::plan::JoinKind;
use crate::storage::{ColumnData, ColumnValues, Overlay, Projection, Scalar};

pub trait Operator: Send {
    fn next(&mut self) -> Result<Option<Batch>>;
}

pub type BoxOp = Box<dyn Operator>;

/// Per-operator counters shared by all partitions.
#[derive(Debug, Default)]
pub struct OpStats {
    pub name: String,
    pub rows: AtomicU64,
    pub nanos: AtomicU64,
}

impl OpStats {
    pub fn new(name: impl Into<String>) -> Arc<Self> {
        Arc::new(OpStats {
            name: name.into(),
            ..Default::default()
        })
    }
}

/// Times an operator's `next` (inclusive of its inputs) and counts rows.
pub struct Instrumented {
    pub inner: BoxOp,
    pub stats: Arc<OpStats>,
}

impl Operator for Instrumented {
    fn next(&mut self) -> Result<Option<Batch>> {
        let t = Instant::now();
        let out = self.inner.next();
        self.stats
            .nanos
            .fetch_add(t.elapsed().as_nanos() as u64, Ordering::Relaxed);
        if let Ok(Some(b)) = &out {
            self.stats.rows.fetch_add(b.len() as u64, Ordering::Relaxed);
        }
        out
    }
}

/// Shared scan state: everything but the cursor.
pub struct ScanSpec {
    pub projection: Arc<Projection>,
    pub schema: Arc<Schema>,
    pub predicate: Option<Expr>,
    pub sips: Vec<(usize, Arc<SipFilter>)>,
    pub overlay: Option<(usize, usize, Overlay)>,
    pub params: Arc<Params>,
    pub batch_size: usize,
    pub bytes_read: Arc<AtomicU64>,
    pub sip_pruned: Arc<AtomicU64>,
    pub tracker: Option<Arc<RowTracker>>,
}

pub struct ScanOp {
    spec: Arc<ScanSpec>,
    pos: usize,
    end: usize,
}

impl ScanOp {
    pub fn new(spec: Arc<ScanSpec>, partition: usize) -> Self {
        let r = spec.projection.partitions[partition].clone();
        ScanOp {
            spec,
            pos: r.start,
            end: r.end,
        }
    }
}

fn apply_overlay(data: &ColumnData, keys: &ColumnData, overlay: &Overlay) -> ColumnData {
    let ids = keys.as_i64().expect("overlay keys are int64");
    let mut values = data.values.clone();
    let mut validity = data.validity.clone();
    for (i, id) in ids.iter().enumerate() {
        if let Some(v) = overlay.values.get(id) {
            match (&mut values, v) {
                (ColumnValues::Int64(x), Scalar::Int(n)) => x[i] = *n,
                (ColumnValues::Float64(x), Scalar::Float(f)) => x[i] = *f,
                (ColumnValues::Float64(x), Scalar::Int(n)) => x[i] = *n as f64,
                (ColumnValues::Utf8(x), Scalar::Str(s)) => x[i] = s.clone(),
                (ColumnValues::Boolean(x), Scalar::Bool(b)) => x[i] = *b,
                _ => continue,
            }
            if let Some(bits) = validity.as_mut() {
                bits.set(i, true);
            }
        }
    }
    ColumnData::new(values, validity)
}

impl Operator for ScanOp {
    fn next(&mut self) -> Result<Option<Batch>> {
        let spec = &*self.spec;
        let table = &spec.projection.table;
        while self.pos < self.end {
            let start = self.pos;
            let end = (start + spec.batch_size).min(self.end);
            self.pos = end;
            let cols = table.columns();
            let bytes: usize = cols
                .iter()
                .map(|c| c.data.logical_type().width() * (end - start))
                .sum();
            spec.bytes_read.fetch_add(bytes as u64, Ordering::Relaxed);

            let mut mask: Option<Vec<bool>> = None;
            for (ci, filter) in &spec.sips {
                let key = cols[*ci].data.slice(start, end);
                let m = mask.get_or_insert_with(|| vec![true; end - start]);
                filter.retain(&key, m);
            }
            let selected: Option<Vec<u32>> = mask.as_ref().map(|m| {
                m.iter()
                    .enumerate()
                    .filter(|(_, &keep)| keep)
                    .map(|(i, _)| (start + i) as u32)
                    .collect()
            });
            if let Some(sel) = &selected {
                spec.sip_pruned
                    .fetch_add((end - start - sel.len()) as u64, Ordering::Relaxed);
                if sel.is_empty() {
                    continue;
                }
            }
            let mut columns: Vec<Arc<ColumnData>> = cols
                .iter()
                .map(|c| {
                    Arc::new(match &selected {
                        Some(sel) => c.data.take(sel),
                        None => c.data.slice(start, end),
                    })
                })
                .collect();
            if let Some((kc, vc, overlay)) = &spec.overlay {
                columns[*vc] = Arc::new(apply_overlay(&columns[*vc], &columns[*kc], overlay));
            }
            let mut batch = Batch::new(spec.schema.clone(), columns);
            if let Some(pred) = &spec.predicate {
                let m = pred.eval_mask(&batch, &spec.params)?;
                if !m.iter().all(|&x| x) {
                    batch = batch.filter(&m);
                }
            }
            if batch.is_empty() {
                continue;
            }
            return Ok(Some(batch.tracked(spec.tracker.as_ref())));
        }
        Ok(None)
    }
}

/// Replays batches materialized by a pipeline breaker.
pub struct ReplayOp {
    pub batches: VecDeque<Batch>,
}

impl Operator for ReplayOp {
    fn next(&mut self) -> Result<Option<Batch>> {
        Ok(self.batches.pop_front())
    }
}

pub struct FilterOp {
    pub input: BoxOp,
    pub predicate: Expr,
    pub params: Arc<Params>,
    pub tracker: Option<Arc<RowTracker>>,
}

impl Operator for FilterOp {
    fn next(&mut self) -> Result<Option<Batch>> {
        while let Some(b) = self.input.next()? {
            let mask = self.predicate.eval_mask(&b, &self.params)?;
            if mask.iter().all(|&m| m) {
                return Ok(Some(b));
            }
            let out = b.filter(&mask);
            drop(b);
            if !out.is_empty() {
                return Ok(Some(out.tracked(self.tracker.as_ref())));
            }
        }
        Ok(None)
    }
}

pub struct ProjectOp {
    pub input: BoxOp,
    pub exprs: Vec<Expr>,
    pub schema: Arc<Schema>,
    pub params: Arc<Params>,
    pub tracker: Option<Arc<RowTracker>>,
}

impl Operator for ProjectOp {
    fn next(&mut self) -> Result<Option<Batch>> {
        let Some(b) = self.input.next()? else {
            return Ok(None);
        };
        let columns = self
            .exprs
            .iter()
            .map(|e| e.eval(&b, &self.params))
            .collect::<Result<Vec<_>>>()?;
        drop(b);
        Ok(Some(
            Batch::new(self.schema.clone(), columns).tracked(self.tracker.as_ref()),
        ))
    }
}

pub struct UnionOp {
    pub inputs: VecDeque<BoxOp>,
    pub schema: Arc<Schema>,
}

impl Operator for UnionOp {
    fn next(&mut self) -> Result<Option<Batch>> {
        while let Some(front) = self.inputs.front_mut() {
            match front.next()? {
                Some(b) => return Ok(Some(b.with_schema(self.schema.clone()))),
                None => {
                    self.inputs.pop_front();
                }
            }
        }
        Ok(None)
    }
}

/// Fully consumed build side of a hash join, shared by every partition.
#[derive(Debug)]
pub struct HashTable {
    pub batch: Batch,
    pub index: HashIndex,
}

impl HashTable {
    pub fn new(batch: Batch, key_idx: &[usize]) -> Self {
        let keys = Keys::extract(&batch, key_idx);
        HashTable {
            index: HashIndex::build(&keys),
            batch,
        }
    }
}

/// Assembles join output: left columns then right columns.
fn assemble(
    schema: &Arc<Schema>,
    left: &Batch,
    left_rows: &[u32],
    right: &Batch,
    right_rows: &[Option<u32>],
) -> Batch {
    let mut columns: Vec<Arc<ColumnData>> = left
        .columns
        .iter()
        .map(|c| Arc::new(c.take(left_rows)))
        .collect();
    if right_rows.iter().all(Option::is_some) {
        let dense: Vec<u32> = right_rows.iter().map(|r| r.unwrap()).collect();
        columns.extend(right.columns.iter().map(|c| Arc::new(c.take(&dense))));
    } else {
        columns.extend(
            right
                .columns
                .iter()
                .map(|c| Arc::new(c.take_opt(right_rows))),
        );
    }
    Batch::new(schema.clone(), columns)
}

/// Streams the probe side through a shared hash table. Output follows probe
/// order, so the probe side's sort order and partitioning carry through.
pub struct HashJoinOp {
    pub probe: BoxOp,
    pub table: Arc<HashTable>,
    pub kind: JoinKind,
    pub probe_is_left: bool,
    pub probe_keys: Vec<usize>,
    pub schema: Arc<Schema>,
    pub batch_size: usize,
    pub tracker: Option<Arc<RowTracker>>,
    pub current: Option<(Batch, Keys, usize, usize)>,
}

impl Operator for HashJoinOp {
    fn next(&mut self) -> Result<Option<Batch>> {
        loop {
            if self.current.is_none() {
                match self.probe.next()? {
                    None => return Ok(None),
                    Some(b) => {
                        let keys = Keys::extract(&b, &self.probe_keys);
                        self.current = Some((b, keys, 0, 0));
                    }
                }
            }
            let (batch, keys, row, offset) = self.current.as_mut().unwrap();
            let mut probe_rows: Vec<u32> = Vec::new();
            let mut build_rows: Vec<Option<u32>> = Vec::new();
            let outer = self.kind == JoinKind::LeftOuter;
            while *row < batch.len() && probe_rows.len() < self.batch_size {
                let matches = if keys.is_null(*row) {
                    &[][..]
                } else {
                    self.table.index.lookup(keys, *row)
                };
                if matches.is_empty() {
                    if outer {
                        probe_rows.push(*row as u32);
                        build_rows.push(None);
                    }
                    *row += 1;
                    continue;
                }
                let room = self.batch_size - probe_rows.len();
                let take = (matches.len() - *offset).min(room);
                for &m in &matches[*offset..*offset + take] {
                    probe_rows.push(*row as u32);
                    build_rows.push(Some(m));
                }
                *offset += take;
                if *offset == matches.len() {
                    *offset = 0;
                    *row += 1;
                }
            }
            let finished = *row >= batch.len();
            let out = if probe_rows.is_empty() {
                None
            } else if self.probe_is_left {
                Some(assemble(
                    &self.schema,
                    batch,
                    &probe_rows,
                    &self.table.batch,
                    &build_rows,
                ))
            } else {
                let build_dense: Vec<u32> = build_rows.iter().map(|r| r.unwrap()).collect();
                let probe_opt: Vec<Option<u32>> = probe_rows.iter().map(|&r| Some(r)).collect();
                Some(assemble(
                    &self.schema,
                    &self.table.batch,
                    &build_dense,
                    batch,
                    &probe_opt,
                ))
            };
            if finished {
                self.current = None;
            }
            if let Some(out) = out {
                return Ok(Some(out.tracked(self.tracker.as_ref())));
            }
        }
    }
}

/// One side of a merge join: a window of buffered batches addressed by a
/// global row number.
struct MergeSide {
    input: BoxOp,
    key_idx: Vec<usize>,
    batches: VecDeque<(Batch, Keys)>,
    /// Global row number of the first buffered row.
    base: usize,
    /// Global row number one past the last buffered row.
    end: usize,
    done: bool,
    label: &'static str,
}

impl MergeSide {
    fn new(input: BoxOp, key_idx: Vec<usize>, label: &'static str) -> Self {
        MergeSide {
            input,
            key_idx,
            batches: VecDeque::new(),
            base: 0,
            end: 0,
            done: false,
            label,
        }
    }

    /// Makes row `g` available; false when the input is exhausted first.
    fn ensure(&mut self, g: usize) -> Result<bool> {
        while g >= self.end {
            if self.done {
                return Ok(false);
            }
            match self.input.next()? {
                None => self.done = true,
                Some(b) if b.is_empty() => {}
                Some(b) => {
                    let keys = Keys::extract(&b, &self.key_idx);
                    for i in 1..keys.len() {
                        if keys.cmp_rows(i - 1, &keys, i).is_gt() {
                            return Err(self.unsorted());
                        }
                    }
                    if let Some((_, prev)) = self.batches.back() {
                        if prev.cmp_rows(prev.len() - 1, &keys, 0).is_gt() {
                            return Err(self.unsorted());
                        }
                    }
                    self.end += b.len();
                    self.batches.push_back((b, keys));
                }
            }
        }
        Ok(true)
    }

    fn unsorted(&self) -> Error {
        Error::plan(format!(
            "merge join {} input is not sorted on its key; a hash join or sort is required",
            self.label
        ))
    }

    #[inline]
    fn locate(&self, g: usize) -> (usize, usize) {
        let mut off = g - self.base;
        for (i, (b, _)) in self.batches.iter().enumerate() {
            if off < b.len() {
                return (i, off);
            }
            off -= b.len();
        }
        unreachable!("row {g} not buffered")
    }

    fn keys_at(&self, g: usize) -> (&Keys, usize) {
        let (bi, r) = self.locate(g);
        (&self.batches[bi].1, r)
    }

    fn cmp(&self, g: usize, other: &MergeSide, h: usize) -> std::cmp::Ordering {
        let (a, i) = self.keys_at(g);
        let (b, j) = other.keys_at(h);
        a.cmp_rows(i, b, j)
    }

    fn is_null(&self, g: usize) -> bool {
        let (k, i) = self.keys_at(g);
        k.is_null(i)
    }

    /// First row after `g` with a different key.
    fn run_end(&mut self, g: usize) -> Result<usize> {
        let mut h = g + 1;
        while self.ensure(h)? && self.cmp(g, self, h).is_eq() {
            h += 1;
        }
        Ok(h)
    }

    /// Drops buffered batches that end at or before row `keep`.
    fn release(&mut self, keep: usize) {
        while let Some((b, _)) = self.batches.front() {
            if self.base + b.len() <= keep {
                self.base += b.len();
                self.batches.pop_front();
            } else {
                break;
            }
        }
    }

    /// All buffered rows as one batch, plus the global number of its first row.
    fn window(&self) -> (Batch, usize) {
        let schema = self.batches[0].0.schema.clone();
        let parts: Vec<Batch> = self.batches.iter().map(|(b, _)| b.clone()).collect();
        (
            Batch::concat(schema, &parts).expect("same schema"),
            self.base,
        )
    }
}

/// Sort-merge join over inputs already sorted on the join keys. Nothing is
/// materialized beyond the batches covering the current key run.
pub struct MergeJoinOp {
    left: MergeSide,
    right: MergeSide,
    kind: JoinKind,
    schema: Arc<Schema>,
    batch_size: usize,
    tracker: Option<Arc<RowTracker>>,
    lpos: usize,
    rpos: usize,
    pending: Vec<(usize, Option<usize>)>,
    finished: bool,
}

impl MergeJoinOp {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        left: BoxOp,
        right: BoxOp,
        left_keys: Vec<usize>,
        right_keys: Vec<usize>,
        kind: JoinKind,
        schema: Arc<Schema>,
        batch_size: usize,
        tracker: Option<Arc<RowTracker>>,
    ) -> Self {
        MergeJoinOp {
            left: MergeSide::new(left, left_keys, "left"),
            right: MergeSide::new(right, right_keys, "right"),
            kind,
            schema,
            batch_size,
            tracker,
            lpos: 0,
            rpos: 0,
            pending: Vec::new(),
            finished: false,
        }
    }

    fn flush(&mut self) -> Option<Batch> {
        if self.pending.is_empty() {
            return None;
        }
        let (lb, lbase) = self.left.window();
        let left_rows: Vec<u32> = self.pending.iter().map(|p| (p.0 - lbase) as u32).collect();
        let out = if self.right.batches.is_empty() {
            let schema = self.schema.clone();
            let nright = schema.len() - lb.columns.len();
            let mut columns: Vec<Arc<ColumnData>> = lb
                .columns
                .iter()
                .map(|c| Arc::new(c.take(&left_rows)))
                .collect();
            for f in &schema.fields[schema.len() - nright..] {
                columns.push(Arc::new(ColumnData::nulls(f.ty, left_rows.len())));
            }
            Batch::new(schema, columns)
        } else {
            let (rb, rbase) = self.right.window();
            let right_rows: Vec<Option<u32>> = self
                .pending
                .iter()
                .map(|p| p.1.map(|r| (r - rbase) as u32))
                .collect();
            assemble(&self.schema, &lb, &left_rows, &rb, &right_rows)
        };
        self.pending.clear();
        self.left.release(self.lpos);
        self.right.release(self.rpos);
        Some(out.tracked(self.tracker.as_ref()))
    }

    /// Emits pending output before the window has to grow.
    fn need(&mut self, left: bool, g: usize) -> Result<(bool, Option<Batch>)> {
        let side = if left { &self.left } else { &self.right };
        if g < side.end {
            return Ok((true, None));
        }
        let flushed = self.flush();
        let side = if left {
            &mut self.left
        } else {
            &mut self.right
        };
        Ok((side.ensure(g)?, flushed))
    }
}

impl Operator for MergeJoinOp {
    fn next(&mut self) -> Result<Option<Batch>> {
        let outer = self.kind == JoinKind::LeftOuter;
        loop {
            if self.finished {
                return Ok(self.flush());
            }
            if self.pending.len() >= self.batch_size {
                return Ok(self.flush());
            }
            let (has_left, out) = self.need(true, self.lpos)?;
            if out.is_some() {
                return Ok(out);
            }
            if !has_left {
                self.finished = true;
                continue;
            }
            let (has_right, out) = self.need(false, self.rpos)?;
            if out.is_some() {
                return Ok(out);
            }
            if !has_right {
                if !outer {
                    self.finished = true;
                    continue;
                }
                self.pending.push((self.lpos, None));
                self.lpos += 1;
                continue;
            }
            if self.left.is_null(self.lpos) {
                if outer {
                    self.pending.push((self.lpos, None));
                }
                self.lpos += 1;
                continue;
            }
            if self.right.is_null(self.rpos) {
                self.rpos += 1;
                continue;
            }
            match self.left.cmp(self.lpos, &self.right, self.rpos) {
                std::cmp::Ordering::Less => {
                    if outer {
                        self.pending.push((self.lpos, None));
                    }
                    self.lpos += 1;
                }
                std::cmp::Ordering::Greater => self.rpos += 1,
                std::cmp::Ordering::Equal => {
                    // Run ends may pull more batches; the run start stays buffered
                    // because release only happens in flush, which keeps lpos/rpos.
                    let lend = self.left.run_end(self.lpos)?;
                    let rend = self.right.run_end(self.rpos)?;
                    for l in self.lpos..lend {
                        for r in self.rpos..rend {
                            self.pending.push((l, Some(r)));
                        }
                    }
                    self.lpos = lend;
                    self.rpos = rend;
                }
            }
        }
    }
}
