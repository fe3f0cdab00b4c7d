// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

//! Lightweight column encodings and their byte-level payload format.
//!
//! Every payload is self-delimiting given the row count and logical type:
//!
//! | encoding     | payload                                                      |
//! |--------------|--------------------------------------------------------------|
//! | `plain`      | int/float: 8 bytes LE each; string: varint len + UTF-8 bytes |
//! | `run_length` | varint run count, then `(value, varint run length)` pairs    |
//! | `dictionary` | varint dict size, dict values, then one varint code per row  |
//! | `delta`      | zigzag varint base, then zigzag varint deltas (int64 only)   |
//!
//! Inside run-length and dictionary payloads integers are zigzag varints,
//! floats are 8 bytes LE and strings are length-prefixed.

use std::sync::Arc;

use rustc_hash::FxHashMap;

use super::column::{Bitmap, Column, ColumnData, ColumnValues, Encoding, LogicalType};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum EncodedValues {
    Plain(ColumnValues),
    RunLength {
        values: ColumnValues,
        run_lengths: Vec<u32>,
    },
    Dictionary {
        dictionary: ColumnValues,
        codes: Vec<u32>,
    },
    Delta {
        base: i64,
        deltas: Vec<i64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodedColumn {
    pub name: String,
    pub logical_type: LogicalType,
    pub row_count: usize,
    pub validity: Option<Bitmap>,
    pub values: EncodedValues,
}

pub fn encode_column(column: &Column, encoding: Encoding) -> Result<EncodedColumn> {
    let ty = column.logical_type();
    if !encoding.applies_to(ty) {
        return Err(Error::UnsupportedEncoding {
            encoding: encoding.name(),
            logical_type: ty.name(),
        });
    }
    let values = match encoding {
        Encoding::Plain => EncodedValues::Plain(column.data.values.clone()),
        Encoding::RunLength => run_length(&column.data.values),
        Encoding::Dictionary => dictionary(&column.data.values),
        Encoding::Delta => {
            let v = column.data.as_i64().expect("checked int64");
            let base = v.first().copied().unwrap_or(0);
            let deltas = v.windows(2).map(|w| w[1].wrapping_sub(w[0])).collect();
            EncodedValues::Delta { base, deltas }
        }
    };
    Ok(EncodedColumn {
        name: column.name.clone(),
        logical_type: ty,
        row_count: column.len(),
        validity: column.data.validity.clone(),
        values,
    })
}

pub fn decode_column(encoded: &EncodedColumn) -> Column {
    encoded.decode()
}

/// Encoding with the smallest payload among those applicable to the column.
pub fn best_encoding(column: &Column) -> Encoding {
    Encoding::ALL
        .into_iter()
        .filter(|e| e.applies_to(column.logical_type()))
        .min_by_key(|&e| {
            encode_column(column, e)
                .map(|c| c.byte_size())
                .unwrap_or(usize::MAX)
        })
        .unwrap_or(Encoding::Plain)
}

fn run_length(values: &ColumnValues) -> EncodedValues {
    fn runs<T: Clone>(v: &[T], same: impl Fn(&T, &T) -> bool) -> (Vec<T>, Vec<u32>) {
        let mut out: Vec<T> = Vec::new();
        let mut lens: Vec<u32> = Vec::new();
        for x in v {
            match (out.last(), lens.last_mut()) {
                (Some(last), Some(len)) if same(last, x) && *len < u32::MAX => *len += 1,
                _ => {
                    out.push(x.clone());
                    lens.push(1);
                }
            }
        }
        (out, lens)
    }
    let (values, run_lengths) = match values {
        ColumnValues::Int64(v) => {
            let (a, b) = runs(v, |x, y| x == y);
            (ColumnValues::Int64(a), b)
        }
        ColumnValues::Float64(v) => {
            let (a, b) = runs(v, |x, y| x.to_bits() == y.to_bits());
            (ColumnValues::Float64(a), b)
        }
        ColumnValues::Utf8(v) => {
            let (a, b) = runs(v, |x, y| x == y);
            (ColumnValues::Utf8(a), b)
        }
        ColumnValues::Boolean(v) => {
            let (a, b) = runs(v, |x, y| x == y);
            (ColumnValues::Boolean(a), b)
        }
    };
    EncodedValues::RunLength {
        values,
        run_lengths,
    }
}

fn dictionary(values: &ColumnValues) -> EncodedValues {
    fn build<T: Clone, K: std::hash::Hash + Eq>(
        v: &[T],
        key: impl Fn(&T) -> K,
    ) -> (Vec<T>, Vec<u32>) {
        let mut index: FxHashMap<K, u32> = FxHashMap::default();
        let mut dict = Vec::new();
        let codes = v
            .iter()
            .map(|x| {
                *index.entry(key(x)).or_insert_with(|| {
                    dict.push(x.clone());
                    (dict.len() - 1) as u32
                })
            })
            .collect();
        (dict, codes)
    }
    let (dictionary, codes) = match values {
        ColumnValues::Int64(v) => {
            let (d, c) = build(v, |x| *x);
            (ColumnValues::Int64(d), c)
        }
        ColumnValues::Float64(v) => {
            let (d, c) = build(v, |x| x.to_bits());
            (ColumnValues::Float64(d), c)
        }
        ColumnValues::Utf8(v) => {
            let (d, c) = build(v, |x| x.clone());
            (ColumnValues::Utf8(d), c)
        }
        ColumnValues::Boolean(v) => {
            let (d, c) = build(v, |x| *x);
            (ColumnValues::Boolean(d), c)
        }
    };
    EncodedValues::Dictionary { dictionary, codes }
}

impl EncodedColumn {
    pub fn encoding(&self) -> Encoding {
        match self.values {
            EncodedValues::Plain(_) => Encoding::Plain,
            EncodedValues::RunLength { .. } => Encoding::RunLength,
            EncodedValues::Dictionary { .. } => Encoding::Dictionary,
            EncodedValues::Delta { .. } => Encoding::Delta,
        }
    }

    pub fn decode(&self) -> Column {
        let values = match &self.values {
            EncodedValues::Plain(v) => v.clone(),
            EncodedValues::RunLength {
                values,
                run_lengths,
            } => {
                let idx: Vec<u32> = run_lengths
                    .iter()
                    .enumerate()
                    .flat_map(|(i, &n)| std::iter::repeat_n(i as u32, n as usize))
                    .collect();
                values.take(&idx)
            }
            EncodedValues::Dictionary { dictionary, codes } => dictionary.take(codes),
            EncodedValues::Delta { base, deltas } => {
                let mut out = Vec::with_capacity(self.row_count);
                if self.row_count > 0 {
                    let mut cur = *base;
                    out.push(cur);
                    for d in deltas {
                        cur = cur.wrapping_add(*d);
                        out.push(cur);
                    }
                }
                ColumnValues::Int64(out)
            }
        };
        Column {
            name: self.name.clone(),
            data: Arc::new(ColumnData::new(values, self.validity.clone())),
            encoding: self.encoding(),
        }
    }

    /// Size of the encoded payload in bytes (validity bitmap excluded).
    pub fn byte_size(&self) -> usize {
        let mut buf = Vec::new();
        self.write_payload(&mut buf);
        buf.len()
    }

    pub fn write_payload(&self, out: &mut Vec<u8>) {
        match &self.values {
            EncodedValues::Plain(v) => write_plain(v, out),
            EncodedValues::RunLength {
                values,
                run_lengths,
            } => {
                write_varint(values.len() as u64, out);
                for (i, &len) in run_lengths.iter().enumerate() {
                    write_packed_value(values, i, out);
                    write_varint(len as u64, out);
                }
            }
            EncodedValues::Dictionary { dictionary, codes } => {
                write_varint(dictionary.len() as u64, out);
                for i in 0..dictionary.len() {
                    write_packed_value(dictionary, i, out);
                }
                for &c in codes {
                    write_varint(c as u64, out);
                }
            }
            EncodedValues::Delta { base, deltas } => {
                write_varint(zigzag(*base), out);
                for &d in deltas {
                    write_varint(zigzag(d), out);
                }
            }
        }
    }

    pub fn read_payload(
        name: &str,
        ty: LogicalType,
        encoding: Encoding,
        row_count: usize,
        validity: Option<Bitmap>,
        input: &mut &[u8],
    ) -> Result<EncodedColumn, String> {
        let values = match encoding {
            Encoding::Plain => EncodedValues::Plain(read_plain(ty, row_count, input)?),
            Encoding::RunLength => {
                let runs = read_varint(input)? as usize;
                let mut values = ColumnValues::with_capacity(ty, runs);
                let mut run_lengths = Vec::with_capacity(runs);
                for _ in 0..runs {
                    read_packed_value(&mut values, input)?;
                    run_lengths.push(read_varint(input)? as u32);
                }
                let total: u64 = run_lengths.iter().map(|&n| n as u64).sum();
                if total != row_count as u64 {
                    return Err(format!("run lengths sum to {total}, expected {row_count}"));
                }
                EncodedValues::RunLength {
                    values,
                    run_lengths,
                }
            }
            Encoding::Dictionary => {
                let size = read_varint(input)? as usize;
                let mut dictionary = ColumnValues::with_capacity(ty, size);
                for _ in 0..size {
                    read_packed_value(&mut dictionary, input)?;
                }
                let mut codes = Vec::with_capacity(row_count);
                for _ in 0..row_count {
                    let c = read_varint(input)? as u32;
                    if c as usize >= size {
                        return Err(format!("dictionary code {c} out of range"));
                    }
                    codes.push(c);
                }
                EncodedValues::Dictionary { dictionary, codes }
            }
            Encoding::Delta => {
                if ty != LogicalType::Int64 {
                    return Err("delta payload on non-integer column".into());
                }
                let base = unzigzag(read_varint(input)?);
                let n = row_count.saturating_sub(1);
                let mut deltas = Vec::with_capacity(n);
                for _ in 0..n {
                    deltas.push(unzigzag(read_varint(input)?));
                }
                EncodedValues::Delta { base, deltas }
            }
        };
        Ok(EncodedColumn {
            name: name.to_string(),
            logical_type: ty,
            row_count,
            validity,
            values,
        })
    }
}

#[inline]
fn zigzag(v: i64) -> u64 {
    ((v << 1) ^ (v >> 63)) as u64
}

#[inline]
fn unzigzag(v: u64) -> i64 {
    ((v >> 1) as i64) ^ -((v & 1) as i64)
}

pub(crate) fn write_varint(mut v: u64, out: &mut Vec<u8>) {
    while v >= 0x80 {
        out.push((v as u8) | 0x80);
        v >>= 7;
    }
    out.push(v as u8);
}

pub(crate) fn read_varint(input: &mut &[u8]) -> Result<u64, String> {
    let mut result = 0u64;
    let mut shift = 0;
    loop {
        let (&byte, rest) = input.split_first().ok_or("truncated varint")?;
        *input = rest;
        if shift >= 64 {
            return Err("varint overflow".into());
        }
        result |= ((byte & 0x7f) as u64) << shift;
        if byte & 0x80 == 0 {
            return Ok(result);
        }
        shift += 7;
    }
}

fn take_bytes<'a>(input: &mut &'a [u8], n: usize) -> Result<&'a [u8], String> {
    if input.len() < n {
        return Err("truncated payload".into());
    }
    let (head, rest) = input.split_at(n);
    *input = rest;
    Ok(head)
}

fn write_str(s: &str, out: &mut Vec<u8>) {
    write_varint(s.len() as u64, out);
    out.extend_from_slice(s.as_bytes());
}

fn read_str(input: &mut &[u8]) -> Result<Arc<str>, String> {
    let len = read_varint(input)? as usize;
    let bytes = take_bytes(input, len)?;
    std::str::from_utf8(bytes)
        .map(Arc::from)
        .map_err(|e| e.to_string())
}

fn write_plain(values: &ColumnValues, out: &mut Vec<u8>) {
    match values {
        ColumnValues::Int64(v) => v
            .iter()
            .for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
        ColumnValues::Float64(v) => v
            .iter()
            .for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
        ColumnValues::Utf8(v) => v.iter().for_each(|s| write_str(s, out)),
        ColumnValues::Boolean(v) => out.extend(v.iter().map(|&b| b as u8)),
    }
}

fn read_plain(ty: LogicalType, n: usize, input: &mut &[u8]) -> Result<ColumnValues, String> {
    Ok(match ty {
        LogicalType::Int64 => ColumnValues::Int64(
            take_bytes(input, n * 8)?
                .chunks_exact(8)
                .map(|c| i64::from_le_bytes(c.try_into().unwrap()))
                .collect(),
        ),
        LogicalType::Float64 => ColumnValues::Float64(
            take_bytes(input, n * 8)?
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect(),
        ),
        LogicalType::Utf8 => {
            let mut v = Vec::with_capacity(n);
            for _ in 0..n {
                v.push(read_str(input)?);
            }
            ColumnValues::Utf8(v)
        }
        LogicalType::Boolean => {
            ColumnValues::Boolean(take_bytes(input, n)?.iter().map(|&b| b != 0).collect())
        }
    })
}

fn write_packed_value(values: &ColumnValues, i: usize, out: &mut Vec<u8>) {
    match values {
        ColumnValues::Int64(v) => write_varint(zigzag(v[i]), out),
        ColumnValues::Float64(v) => out.extend_from_slice(&v[i].to_le_bytes()),
        ColumnValues::Utf8(v) => write_str(&v[i], out),
        ColumnValues::Boolean(v) => out.push(v[i] as u8),
    }
}

fn read_packed_value(values: &mut ColumnValues, input: &mut &[u8]) -> Result<(), String> {
    match values {
        ColumnValues::Int64(v) => v.push(unzigzag(read_varint(input)?)),
        ColumnValues::Float64(v) => v.push(f64::from_le_bytes(
            take_bytes(input, 8)?.try_into().unwrap(),
        )),
        ColumnValues::Utf8(v) => v.push(read_str(input)?),
        ColumnValues::Boolean(v) => v.push(take_bytes(input, 1)?[0] != 0),
    }
    Ok(())
}
