// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

use std::cmp::Ordering;
use std::sync::Arc;

use rustc_hash::{FxHashMap, FxHashSet};
use smallvec::SmallVec;

use super::batch::Batch;
use crate::storage::{ColumnData, Scalar};

pub type KeyRow = SmallVec<[Scalar; 2]>;

/// Join or group keys of one batch, with a fast path for a single non-null
/// int64 column.
#[derive(Debug, Clone)]
pub enum Keys {
    Int(Arc<ColumnData>),
    Rows(Vec<Option<KeyRow>>),
}

impl Keys {
    /// Extracts keys; rows with any null key component become `None` in the
    /// general path (nulls never compare equal in joins).
    pub fn extract(batch: &Batch, idx: &[usize]) -> Keys {
        if let [i] = idx {
            let c = batch.column(*i);
            if c.as_i64().is_some() && c.validity.is_none() {
                return Keys::Int(c.clone());
            }
        }
        Keys::Rows(
            (0..batch.len())
                .map(|r| {
                    let row: KeyRow = idx.iter().map(|&i| batch.column(i).scalar(r)).collect();
                    (!row.iter().any(Scalar::is_null)).then_some(row)
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        match self {
            Keys::Int(c) => c.len(),
            Keys::Rows(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn ints(&self) -> Option<&[i64]> {
        match self {
            Keys::Int(c) => c.as_i64(),
            Keys::Rows(_) => None,
        }
    }

    pub fn row(&self, i: usize) -> Option<KeyRow> {
        match self {
            Keys::Int(c) => Some(smallvec::smallvec![Scalar::Int(c.as_i64().unwrap()[i])]),
            Keys::Rows(r) => r[i].clone(),
        }
    }

    /// Orders row `i` of `self` against row `j` of `other`; null keys sort first.
    #[inline]
    pub fn cmp_rows(&self, i: usize, other: &Keys, j: usize) -> Ordering {
        match (self, other) {
            (Keys::Int(a), Keys::Int(b)) => a.as_i64().unwrap()[i].cmp(&b.as_i64().unwrap()[j]),
            _ => self.row(i).cmp(&other.row(j)),
        }
    }

    #[inline]
    pub fn is_null(&self, i: usize) -> bool {
        match self {
            Keys::Int(_) => false,
            Keys::Rows(r) => r[i].is_none(),
        }
    }
}

/// Build-side key set pushed into probe-side scans.
#[derive(Debug, Clone)]
pub enum SipFilter {
    Ints(FxHashSet<i64>),
    Range { min: i64, max: i64 },
    Values(FxHashSet<Scalar>),
    Nothing,
}

/// Exact sets up to this many distinct keys; a min/max range beyond.
pub const SIP_EXACT_LIMIT: usize = 1_000_000;

impl SipFilter {
    pub fn from_keys(keys: &Keys) -> SipFilter {
        match keys {
            Keys::Int(c) => {
                let v = c.as_i64().unwrap();
                if v.is_empty() {
                    return SipFilter::Nothing;
                }
                if v.len() <= SIP_EXACT_LIMIT {
                    return SipFilter::Ints(v.iter().copied().collect());
                }
                let set: FxHashSet<i64> = v.iter().copied().collect();
                if set.len() <= SIP_EXACT_LIMIT {
                    SipFilter::Ints(set)
                } else {
                    SipFilter::Range {
                        min: *v.iter().min().unwrap(),
                        max: *v.iter().max().unwrap(),
                    }
                }
            }
            Keys::Rows(rows) => {
                let set: FxHashSet<Scalar> = rows.iter().flatten().map(|r| r[0].clone()).collect();
                if set.is_empty() {
                    SipFilter::Nothing
                } else {
                    SipFilter::Values(set)
                }
            }
        }
    }

    /// Marks rows of `column` that may find a join partner.
    pub fn retain(&self, column: &ColumnData, mask: &mut [bool]) {
        match (self, column.as_i64()) {
            (SipFilter::Nothing, _) => mask.fill(false),
            (SipFilter::Ints(set), Some(v)) => {
                for (m, x) in mask.iter_mut().zip(v) {
                    *m = *m && set.contains(x);
                }
            }
            (SipFilter::Range { min, max }, Some(v)) => {
                for (m, x) in mask.iter_mut().zip(v) {
                    *m = *m && (*min..=*max).contains(x);
                }
            }
            _ => {
                for (i, m) in mask.iter_mut().enumerate() {
                    if *m {
                        let s = column.scalar(i);
                        *m = !s.is_null()
                            && match self {
                                SipFilter::Values(set) => set.contains(&s),
                                SipFilter::Ints(set) => {
                                    s.as_i64().is_some_and(|x| set.contains(&x))
                                }
                                SipFilter::Range { min, max } => {
                                    s.as_i64().is_some_and(|x| (*min..=*max).contains(&x))
                                }
                                SipFilter::Nothing => false,
                            };
                    }
                }
            }
        }
        if let Some(bits) = &column.validity {
            for (i, m) in mask.iter_mut().enumerate() {
                *m = *m && bits.get(i);
            }
        }
    }
}

/// Hash index over build-side keys: key -> contiguous slice of row ids.
#[derive(Debug)]
pub enum HashIndex {
    Int {
        slots: FxHashMap<i64, (u32, u32)>,
        rows: Vec<u32>,
    },
    Rows {
        slots: FxHashMap<KeyRow, (u32, u32)>,
        rows: Vec<u32>,
    },
}

impl HashIndex {
    pub fn build(keys: &Keys) -> HashIndex {
        match keys {
            Keys::Int(c) => {
                let v = c.as_i64().unwrap();
                let mut counts: FxHashMap<i64, (u32, u32)> = FxHashMap::default();
                counts.reserve(v.len());
                for &k in v {
                    counts.entry(k).or_default().1 += 1;
                }
                let mut next = 0u32;
                for slot in counts.values_mut() {
                    slot.0 = next;
                    next += slot.1;
                    slot.1 = 0;
                }
                let mut rows = vec![0u32; v.len()];
                for (i, &k) in v.iter().enumerate() {
                    let slot = counts.get_mut(&k).unwrap();
                    rows[(slot.0 + slot.1) as usize] = i as u32;
                    slot.1 += 1;
                }
                HashIndex::Int {
                    slots: counts,
                    rows,
                }
            }
            Keys::Rows(r) => {
                let mut groups: FxHashMap<KeyRow, Vec<u32>> = FxHashMap::default();
                for (i, k) in r.iter().enumerate() {
                    if let Some(k) = k {
                        groups.entry(k.clone()).or_default().push(i as u32);
                    }
                }
                let mut rows = Vec::with_capacity(r.len());
                let slots = groups
                    .into_iter()
                    .map(|(k, ids)| {
                        let start = rows.len() as u32;
                        rows.extend_from_slice(&ids);
                        (k, (start, ids.len() as u32))
                    })
                    .collect();
                HashIndex::Rows { slots, rows }
            }
        }
    }

    /// Build rows matching probe row `i`, in build order.
    #[inline]
    pub fn lookup<'a>(&'a self, probe: &Keys, i: usize) -> &'a [u32] {
        let (slot, rows) = match (self, probe) {
            (HashIndex::Int { slots, rows }, Keys::Int(c)) => {
                (slots.get(&c.as_i64().unwrap()[i]), rows)
            }
            (HashIndex::Int { slots, rows }, Keys::Rows(r)) => (
                r[i].as_ref()
                    .and_then(|k| k[0].as_i64())
                    .and_then(|k| slots.get(&k)),
                rows,
            ),
            (HashIndex::Rows { slots, rows }, _) => {
                (probe.row(i).and_then(|k| slots.get(&k)), rows)
            }
        };
        match slot {
            Some(&(start, len)) => &rows[start as usize..(start + len) as usize],
            None => &[],
        }
    }
}
