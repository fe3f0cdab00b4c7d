// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

use std::cmp::Ordering;
use std::ops::Range;

use super::column::{ColumnData, Scalar};
use super::table::ColumnTable;
use crate::error::{Error, Result};

/// splitmix64 finalizer; the partitioning hash for every segmented layout.
#[inline]
pub fn mix64(v: u64) -> u64 {
    let mut z = v.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn hash_scalar(value: &Scalar) -> u64 {
    match value {
        Scalar::Null => 0,
        Scalar::Int(v) => mix64(*v as u64),
        Scalar::Float(v) => mix64(v.to_bits()),
        Scalar::Bool(v) => mix64(*v as u64),
        Scalar::Str(s) => {
            // FNV-1a, then mixed.
            let mut h: u64 = 0xcbf2_9ce4_8422_2325;
            for b in s.as_bytes() {
                h = (h ^ *b as u64).wrapping_mul(0x100_0000_01b3);
            }
            mix64(h)
        }
    }
}

#[inline]
pub fn partition_of_i64(v: i64, partitions: usize) -> usize {
    (mix64(v as u64) % partitions as u64) as usize
}

/// Partition index for every row of `column`.
pub fn partition_assignment(column: &ColumnData, partitions: usize) -> Vec<u32> {
    if partitions <= 1 {
        return vec![0; column.len()];
    }
    match (column.as_i64(), &column.validity) {
        (Some(v), None) => v
            .iter()
            .map(|&x| partition_of_i64(x, partitions) as u32)
            .collect(),
        _ => (0..column.len())
            .map(|i| (hash_scalar(&column.scalar(i)) % partitions as u64) as u32)
            .collect(),
    }
}

/// A physically stored, sorted and hash-segmented copy of a table.
#[derive(Debug, Clone)]
pub struct Projection {
    pub name: String,
    pub base: String,
    pub sort_key: Vec<String>,
    pub segmentation_key: String,
    /// Row ranges of `table`, one per partition.
    pub partitions: Vec<Range<usize>>,
    /// Projection rows, partition by partition.
    pub table: ColumnTable,
}

pub fn build_projection(
    name: impl Into<String>,
    table: &ColumnTable,
    sort_key: &[&str],
    segmentation_key: &str,
    partitions: usize,
) -> Result<Projection> {
    if partitions == 0 {
        return Err(Error::schema("projection needs at least one partition"));
    }
    let seg = table.column(segmentation_key)?;
    let keys = sort_key
        .iter()
        .map(|k| table.column(k).map(|c| c.data.clone()))
        .collect::<Result<Vec<_>>>()?;
    let part = partition_assignment(&seg.data, partitions);

    let mut order: Vec<u32> = (0..table.row_count() as u32).collect();
    let int_keys: Option<Vec<&[i64]>> = keys
        .iter()
        .map(|k| k.as_i64().filter(|_| k.validity.is_none()))
        .collect();
    match int_keys {
        Some(ints) => order.sort_unstable_by(|&a, &b| {
            let (a, b) = (a as usize, b as usize);
            part[a]
                .cmp(&part[b])
                .then_with(|| {
                    ints.iter()
                        .map(|c| c[a].cmp(&c[b]))
                        .find(|o| o.is_ne())
                        .unwrap_or(Ordering::Equal)
                })
                .then(a.cmp(&b))
        }),
        None => order.sort_by(|&a, &b| {
            let (a, b) = (a as usize, b as usize);
            part[a].cmp(&part[b]).then_with(|| {
                keys.iter()
                    .map(|c| c.scalar(a).cmp(&c.scalar(b)))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal)
            })
        }),
    }

    let mut ranges = Vec::with_capacity(partitions);
    let mut start = 0;
    for p in 0..partitions as u32 {
        let len = order[start..]
            .iter()
            .take_while(|&&r| part[r as usize] == p)
            .count();
        ranges.push(start..start + len);
        start += len;
    }

    let name = name.into();
    Ok(Projection {
        table: table.take(&order).with_name(name.clone()),
        name,
        base: table.name().to_string(),
        sort_key: sort_key.iter().map(|s| s.to_string()).collect(),
        segmentation_key: segmentation_key.to_string(),
        partitions: ranges,
    })
}

impl Projection {
    pub fn partition_count(&self) -> usize {
        self.partitions.len()
    }

    pub fn row_count(&self) -> usize {
        self.table.row_count()
    }

    /// True when rows are ordered by `column` within each partition.
    pub fn is_sorted_on(&self, column: &str) -> bool {
        self.sort_key.first().is_some_and(|k| k == column)
    }

    pub fn partition_rows(&self, p: usize) -> ColumnTable {
        let idx: Vec<u32> = self.partitions[p].clone().map(|i| i as u32).collect();
        self.table.take(&idx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::storage::Column;
    use proptest::prelude::*;

    fn path4_edges() -> ColumnTable {
        ColumnTable::new(
            "edge",
            vec![
                Column::new("from_node", vec![0i64, 1, 2]),
                Column::new("to_node", vec![1i64, 2, 3]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn single_partition_sorted_by_from() {
        let p = build_projection("p", &path4_edges(), &["from_node"], "from_node", 1).unwrap();
        assert_eq!(p.table.i64_column("from_node").unwrap(), &[0, 1, 2]);
        assert_eq!(p.table.i64_column("to_node").unwrap(), &[1, 2, 3]);
        assert_eq!(p.partitions, vec![0..3]);
    }

    #[test]
    fn sorted_by_to_node() {
        let p = build_projection("p", &path4_edges(), &["to_node"], "to_node", 1).unwrap();
        assert_eq!(p.table.i64_column("to_node").unwrap(), &[1, 2, 3]);
    }

    #[test]
    fn two_partitions_cover_all_rows() {
        let p = build_projection("p", &path4_edges(), &["from_node"], "from_node", 2).unwrap();
        assert_eq!(p.partitions.len(), 2);
        assert_eq!(p.partitions.iter().map(|r| r.len()).sum::<usize>(), 3);
        assert_eq!(p.partitions[0].end, p.partitions[1].start);
        assert_eq!(p.table, path4_edges());
    }

    #[test]
    fn unknown_column_is_schema_error() {
        let err = build_projection("p", &path4_edges(), &["nope"], "from_node", 1).unwrap_err();
        assert!(matches!(err, Error::Schema(_)));
    }

    proptest! {
        #[test]
        fn projection_is_a_sorted_partitioned_permutation(
            rows in prop::collection::vec((0i64..20, 0i64..20), 0..80),
            parts in 1usize..6,
        ) {
            let t = ColumnTable::new("t", vec![
                Column::new("a", rows.iter().map(|r| r.0).collect::<Vec<_>>()),
                Column::new("b", rows.iter().map(|r| r.1).collect::<Vec<_>>()),
            ]).unwrap();
            let p = build_projection("p", &t, &["b", "a"], "a", parts).unwrap();
            prop_assert_eq!(&p.table, &t);
            let a = p.table.i64_column("a").unwrap();
            let b = p.table.i64_column("b").unwrap();
            for (pi, r) in p.partitions.iter().enumerate() {
                for i in r.clone() {
                    prop_assert_eq!(partition_of_i64(a[i], parts), pi);
                    if i > r.start {
                        prop_assert!((b[i - 1], a[i - 1]) <= (b[i], a[i]));
                    }
                }
            }
        }
    }
}
