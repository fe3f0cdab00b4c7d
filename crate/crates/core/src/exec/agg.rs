// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

//! Group-by aggregation: one-pass streaming over key-sorted input, or hash.

use std::collections::VecDeque;
use std::sync::Arc;

use rustc_hash::FxHashMap;

use super::batch::{Batch, RowTracker, Schema};
use super::keys::{KeyRow, Keys};
use super::ops::{BoxOp, Operator};
use crate::error::{Error, Result};
use crate::expr::{Expr, Params};
use crate::plan::{AggExpr, AggFunc};
use crate::storage::{Bitmap, ColumnData, ColumnValues, LogicalType, Scalar};

/// Resolved aggregation: key column indices, aggregate inputs, output schema.
#[derive(Debug)]
pub struct AggSpec {
    pub keys: Vec<usize>,
    pub aggs: Vec<AggExpr>,
    pub having: Option<Expr>,
    pub schema: Arc<Schema>,
    pub params: Arc<Params>,
    pub batch_size: usize,
    pub tracker: Option<Arc<RowTracker>>,
}

#[derive(Debug)]
enum Acc {
    MinI(Vec<i64>, Vec<bool>),
    MaxI(Vec<i64>, Vec<bool>),
    SumI(Vec<i64>, Vec<bool>),
    MinF(Vec<f64>, Vec<bool>),
    MaxF(Vec<f64>, Vec<bool>),
    SumF(Vec<f64>, Vec<bool>),
    MinS(Vec<Scalar>, LogicalType),
    MaxS(Vec<Scalar>, LogicalType),
    Count(Vec<i64>),
}

impl Acc {
    fn new(func: AggFunc, ty: LogicalType) -> Result<Acc> {
        use LogicalType::*;
        Ok(match (func, ty) {
            (AggFunc::Count | AggFunc::CountNull, _) => Acc::Count(Vec::new()),
            (AggFunc::Min, Int64) => Acc::MinI(Vec::new(), Vec::new()),
            (AggFunc::Max, Int64) => Acc::MaxI(Vec::new(), Vec::new()),
            (AggFunc::Sum, Int64) => Acc::SumI(Vec::new(), Vec::new()),
            (AggFunc::Min, Float64) => Acc::MinF(Vec::new(), Vec::new()),
            (AggFunc::Max, Float64) => Acc::MaxF(Vec::new(), Vec::new()),
            (AggFunc::Sum, Float64) => Acc::SumF(Vec::new(), Vec::new()),
            (AggFunc::Min, t) => Acc::MinS(Vec::new(), t),
            (AggFunc::Max, t) => Acc::MaxS(Vec::new(), t),
            (AggFunc::Sum, t) => return Err(Error::schema(format!("SUM over {t}"))),
        })
    }

    fn push_group(&mut self) {
        match self {
            Acc::MinI(v, s) | Acc::MaxI(v, s) | Acc::SumI(v, s) => {
                v.push(0);
                s.push(false);
            }
            Acc::MinF(v, s) | Acc::MaxF(v, s) | Acc::SumF(v, s) => {
                v.push(0.0);
                s.push(false);
            }
            Acc::MinS(v, _) | Acc::MaxS(v, _) => v.push(Scalar::Null),
            Acc::Count(v) => v.push(0),
        }
    }

    /// Folds `rows` (row, group) pairs of `input` into the accumulators.
    fn update(&mut self, func: AggFunc, input: Option<&ColumnData>, rows: &[(u32, u32)]) {
        let valid = |i: u32| input.is_none_or(|c| !c.is_null(i as usize));
        match self {
            Acc::Count(v) => {
                for &(r, g) in rows {
                    let hit = match func {
                        AggFunc::CountNull => !valid(r),
                        _ => valid(r),
                    };
                    v[g as usize] += hit as i64;
                }
            }
            Acc::MinI(v, s) | Acc::MaxI(v, s) | Acc::SumI(v, s) => {
                let x = input.and_then(ColumnData::as_i64).expect("int input");
                for &(r, g) in rows {
                    if !valid(r) {
                        continue;
                    }
                    let (g, val) = (g as usize, x[r as usize]);
                    v[g] = if !s[g] {
                        val
                    } else {
                        match func {
                            AggFunc::Min => v[g].min(val),
                            AggFunc::Max => v[g].max(val),
                            _ => v[g].saturating_add(val),
                        }
                    };
                    s[g] = true;
                }
            }
            Acc::MinF(v, s) | Acc::MaxF(v, s) | Acc::SumF(v, s) => {
                let c = input.expect("float input");
                let owned;
                let x: &[f64] = match c.as_f64() {
                    Some(x) => x,
                    None => {
                        owned = c
                            .as_i64()
                            .unwrap()
                            .iter()
                            .map(|&i| i as f64)
                            .collect::<Vec<_>>();
                        &owned
                    }
                };
                for &(r, g) in rows {
                    if !valid(r) {
                        continue;
                    }
                    let (g, val) = (g as usize, x[r as usize]);
                    v[g] = if !s[g] {
                        val
                    } else {
                        match func {
                            AggFunc::Min => v[g].min(val),
                            AggFunc::Max => v[g].max(val),
                            _ => v[g] + val,
                        }
                    };
                    s[g] = true;
                }
            }
            Acc::MinS(v, _) | Acc::MaxS(v, _) => {
                let c = input.expect("input");
                for &(r, g) in rows {
                    let val = c.scalar(r as usize);
                    if val.is_null() {
                        continue;
                    }
                    let cur = &mut v[g as usize];
                    let replace = cur.is_null()
                        || match func {
                            AggFunc::Min => val < *cur,
                            _ => val > *cur,
                        };
                    if replace {
                        *cur = val;
                    }
                }
            }
        }
    }

    fn finish(&mut self) -> ColumnData {
        fn take<T>(v: &mut Vec<T>) -> Vec<T> {
            std::mem::take(v)
        }
        match self {
            Acc::MinI(v, s) | Acc::MaxI(v, s) | Acc::SumI(v, s) => ColumnData::new(
                ColumnValues::Int64(take(v)),
                Some(Bitmap::from_bools(take(s))),
            ),
            Acc::MinF(v, s) | Acc::MaxF(v, s) | Acc::SumF(v, s) => ColumnData::new(
                ColumnValues::Float64(take(v)),
                Some(Bitmap::from_bools(take(s))),
            ),
            Acc::MinS(v, ty) => ColumnData::from_scalars(*ty, &take(v)).expect("uniform type"),
            Acc::MaxS(v, ty) => ColumnData::from_scalars(*ty, &take(v)).expect("uniform type"),
            Acc::Count(v) => ColumnData::from(take(v)),
        }
    }
}

/// Group keys and accumulators for the groups of one output window.
struct Groups {
    keys: Vec<(ColumnValues, Vec<bool>)>,
    accs: Vec<Acc>,
    count: usize,
}

impl Groups {
    fn new(spec: &AggSpec) -> Result<Groups> {
        let nk = spec.keys.len();
        let keys = spec.schema.fields[..nk]
            .iter()
            .map(|f| (ColumnValues::empty(f.ty), Vec::new()))
            .collect();
        let accs = spec
            .aggs
            .iter()
            .zip(&spec.schema.fields[nk..])
            .map(|(a, f)| Acc::new(a.func, f.ty))
            .collect::<Result<_>>()?;
        Ok(Groups {
            keys,
            accs,
            count: 0,
        })
    }

    fn add(&mut self, batch: &Batch, key_idx: &[usize], row: usize) -> u32 {
        for ((values, valid), &k) in self.keys.iter_mut().zip(key_idx) {
            let s = batch.column(k).scalar(row);
            valid.push(!s.is_null());
            values.push_scalar(&s).expect("key types match");
        }
        for a in &mut self.accs {
            a.push_group();
        }
        self.count += 1;
        (self.count - 1) as u32
    }

    fn update(&mut self, spec: &AggSpec, args: &[Option<Arc<ColumnData>>], rows: &[(u32, u32)]) {
        for ((acc, agg), arg) in self.accs.iter_mut().zip(&spec.aggs).zip(args) {
            acc.update(agg.func, arg.as_deref(), rows);
        }
    }

    fn finish(&mut self, spec: &AggSpec) -> Result<Option<Batch>> {
        if self.count == 0 {
            return Ok(None);
        }
        let mut columns: Vec<Arc<ColumnData>> = self
            .keys
            .iter_mut()
            .map(|(v, valid)| {
                let values = std::mem::replace(v, ColumnValues::empty(v.logical_type()));
                Arc::new(ColumnData::new(
                    values,
                    Some(Bitmap::from_bools(std::mem::take(valid))),
                ))
            })
            .collect();
        columns.extend(self.accs.iter_mut().map(|a| Arc::new(a.finish())));
        self.count = 0;
        let mut batch = Batch::new(spec.schema.clone(), columns);
        if let Some(h) = &spec.having {
            let mask = h.eval_mask(&batch, &spec.params)?;
            batch = batch.filter(&mask);
        }
        Ok((!batch.is_empty()).then(|| batch.tracked(spec.tracker.as_ref())))
    }
}

fn eval_args(spec: &AggSpec, batch: &Batch) -> Result<Vec<Option<Arc<ColumnData>>>> {
    spec.aggs
        .iter()
        .map(|a| {
            a.arg
                .as_ref()
                .map(|e| e.eval(batch, &spec.params))
                .transpose()
        })
        .collect()
}

/// Leading group-key value of the open run.
#[derive(Debug, Clone)]
enum RunKey {
    Int(i64),
    Row(Option<KeyRow>),
}

impl RunKey {
    fn of(keys: &Keys, r: usize) -> RunKey {
        match keys.ints() {
            Some(v) => RunKey::Int(v[r]),
            None => RunKey::Row(keys.row(r)),
        }
    }

    fn cmp(&self, other: &RunKey) -> std::cmp::Ordering {
        match (self, other) {
            (RunKey::Int(a), RunKey::Int(b)) => a.cmp(b),
            _ => self.as_row().cmp(&other.as_row()),
        }
    }

    fn as_row(&self) -> Option<KeyRow> {
        match self {
            RunKey::Int(v) => Some(smallvec::smallvec![Scalar::Int(*v)]),
            RunKey::Row(r) => r.clone(),
        }
    }
}

/// One-pass aggregation over input sorted on `keys[lead]`: a group is
/// complete as soon as the leading key changes, so only the current run
/// is held in memory.
pub struct StreamingAggOp {
    input: BoxOp,
    spec: Arc<AggSpec>,
    lead: usize,
    groups: Groups,
    run: Option<RunKey>,
    run_groups: FxHashMap<KeyRow, u32>,
    run_single: Option<u32>,
    out: VecDeque<Batch>,
    done: bool,
}

impl StreamingAggOp {
    pub fn new(input: BoxOp, spec: Arc<AggSpec>, lead: usize) -> Result<Self> {
        Ok(StreamingAggOp {
            groups: Groups::new(&spec)?,
            input,
            spec,
            lead,
            run: None,
            run_groups: FxHashMap::default(),
            run_single: None,
            out: VecDeque::new(),
            done: false,
        })
    }

    fn consume(&mut self, batch: Batch) -> Result<()> {
        let spec = self.spec.clone();
        let lead_keys = Keys::extract(&batch, &[spec.keys[self.lead]]);
        let args = eval_args(&spec, &batch)?;
        let mut rows: Vec<(u32, u32)> = Vec::with_capacity(batch.len());
        for r in 0..batch.len() {
            let key = RunKey::of(&lead_keys, r);
            let new_run = match &self.run {
                None => true,
                Some(cur) => match cur.cmp(&key) {
                    std::cmp::Ordering::Equal => false,
                    std::cmp::Ordering::Less => true,
                    std::cmp::Ordering::Greater => {
                        return Err(Error::plan(
                            "streaming aggregation input is not sorted on its group key",
                        ))
                    }
                },
            };
            if new_run {
                self.run_groups.clear();
                self.run_single = None;
                if self.groups.count >= spec.batch_size {
                    self.groups.update(&spec, &args, &rows);
                    rows.clear();
                    if let Some(b) = self.groups.finish(&spec)? {
                        self.out.push_back(b);
                    }
                }
                self.run = Some(key);
            }
            let gid = if spec.keys.len() == 1 {
                match self.run_single {
                    Some(g) => g,
                    None => {
                        let g = self.groups.add(&batch, &spec.keys, r);
                        self.run_single = Some(g);
                        g
                    }
                }
            } else {
                let full: KeyRow = spec
                    .keys
                    .iter()
                    .map(|&k| batch.column(k).scalar(r))
                    .collect();
                match self.run_groups.get(&full) {
                    Some(&g) => g,
                    None => {
                        let g = self.groups.add(&batch, &spec.keys, r);
                        self.run_groups.insert(full, g);
                        g
                    }
                }
            };
            rows.push((r as u32, gid));
        }
        self.groups.update(&spec, &args, &rows);
        Ok(())
    }
}

impl Operator for StreamingAggOp {
    fn next(&mut self) -> Result<Option<Batch>> {
        loop {
            if let Some(b) = self.out.pop_front() {
                return Ok(Some(b));
            }
            if self.done {
                return Ok(None);
            }
            match self.input.next()? {
                Some(b) => self.consume(b)?,
                None => {
                    self.done = true;
                    let spec = self.spec.clone();
                    if let Some(b) = self.groups.finish(&spec)? {
                        self.out.push_back(b);
                    }
                }
            }
        }
    }
}

/// Hash aggregation: consumes its whole input, then emits groups in order
/// of first appearance.
pub struct HashAggOp {
    input: BoxOp,
    spec: Arc<AggSpec>,
    out: VecDeque<Batch>,
    done: bool,
}

impl HashAggOp {
    pub fn new(input: BoxOp, spec: Arc<AggSpec>) -> Self {
        HashAggOp {
            input,
            spec,
            out: VecDeque::new(),
            done: false,
        }
    }

    fn run(&mut self) -> Result<()> {
        let spec = self.spec.clone();
        let mut groups = Groups::new(&spec)?;
        let mut int_map: FxHashMap<i64, u32> = FxHashMap::default();
        let mut row_map: FxHashMap<KeyRow, u32> = FxHashMap::default();
        let mut null_group: Option<u32> = None;
        while let Some(batch) = self.input.next()? {
            let keys = Keys::extract(&batch, &spec.keys);
            let args = eval_args(&spec, &batch)?;
            let mut rows = Vec::with_capacity(batch.len());
            for r in 0..batch.len() {
                let gid = if spec.keys.is_empty() {
                    *null_group.get_or_insert_with(|| groups.add(&batch, &spec.keys, r))
                } else if let Some(k) = keys
                    .ints()
                    .map(|v| v[r])
                    .or_else(|| single_int(&spec, &batch, r))
                {
                    match int_map.get(&k) {
                        Some(&g) => g,
                        None => {
                            let g = groups.add(&batch, &spec.keys, r);
                            int_map.insert(k, g);
                            g
                        }
                    }
                } else {
                    // Null keys group together, as in SQL GROUP BY.
                    let key: KeyRow = spec
                        .keys
                        .iter()
                        .map(|&k| batch.column(k).scalar(r))
                        .collect();
                    match row_map.get(&key) {
                        Some(&g) => g,
                        None => {
                            let g = groups.add(&batch, &spec.keys, r);
                            row_map.insert(key, g);
                            g
                        }
                    }
                };
                rows.push((r as u32, gid));
            }
            groups.update(&spec, &args, &rows);
        }
        if spec.keys.is_empty() && groups.count == 0 {
            // Global aggregate over empty input still yields one row.
            for a in &mut groups.accs {
                a.push_group();
            }
            groups.count = 1;
        }
        if let Some(b) = groups.finish(&spec)? {
            let n = b.len();
            let mut start = 0;
            while start < n {
                let end = (start + spec.batch_size).min(n);
                self.out.push_back(b.slice(start, end));
                start = end;
            }
        }
        Ok(())
    }
}

/// The key of row `r` when the group key is a single non-null int, so that
/// batches with and without nulls share one map.
fn single_int(spec: &AggSpec, batch: &Batch, r: usize) -> Option<i64> {
    match spec.keys[..] {
        [k] => {
            let c = batch.column(k);
            c.as_i64().filter(|_| !c.is_null(r)).map(|v| v[r])
        }
        _ => None,
    }
}

impl Operator for HashAggOp {
    fn next(&mut self) -> Result<Option<Batch>> {
        if !self.done {
            self.done = true;
            self.run()?;
        }
        Ok(self.out.pop_front())
    }
}
