// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogicalType {
    Int64,
    Float64,
    Utf8,
    /// Only produced by expression evaluation; never stored.
    Boolean,
}

impl LogicalType {
    pub fn name(self) -> &'static str {
        match self {
            LogicalType::Int64 => "int64",
            LogicalType::Float64 => "float64",
            LogicalType::Utf8 => "string",
            LogicalType::Boolean => "boolean",
        }
    }

    pub fn is_numeric(self) -> bool {
        matches!(self, LogicalType::Int64 | LogicalType::Float64)
    }

    /// Fixed per-value width used by the byte counters.
    pub fn width(self) -> usize {
        match self {
            LogicalType::Int64 | LogicalType::Float64 => 8,
            LogicalType::Utf8 => 16,
            LogicalType::Boolean => 1,
        }
    }
}

impl fmt::Display for LogicalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A single value, used for literals, parameters and row-wise access.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Null,
    Int(i64),
    Float(f64),
    Str(Arc<str>),
    Bool(bool),
}

impl Scalar {
    pub fn str(s: &str) -> Self {
        Scalar::Str(Arc::from(s))
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Scalar::Null)
    }

    pub fn logical_type(&self) -> Option<LogicalType> {
        match self {
            Scalar::Null => None,
            Scalar::Int(_) => Some(LogicalType::Int64),
            Scalar::Float(_) => Some(LogicalType::Float64),
            Scalar::Str(_) => Some(LogicalType::Utf8),
            Scalar::Bool(_) => Some(LogicalType::Boolean),
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self {
            Scalar::Int(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Scalar::Int(v) => Some(*v as f64),
            Scalar::Float(v) => Some(*v),
            _ => None,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Scalar::Null => 0,
            Scalar::Bool(_) => 1,
            Scalar::Int(_) | Scalar::Float(_) => 2,
            Scalar::Str(_) => 3,
        }
    }
}

/// Total order: nulls first, numbers compared numerically, floats by `total_cmp`.
impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Scalar::Int(a), Scalar::Int(b)) => a.cmp(b),
            (Scalar::Float(a), Scalar::Float(b)) => a.total_cmp(b),
            (Scalar::Int(a), Scalar::Float(b)) => (*a as f64).total_cmp(b),
            (Scalar::Float(a), Scalar::Int(b)) => a.total_cmp(&(*b as f64)),
            (Scalar::Str(a), Scalar::Str(b)) => a.cmp(b),
            (Scalar::Bool(a), Scalar::Bool(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Scalar {}

/// Consistent with `Eq`: integral floats hash like the equal integer.
impl std::hash::Hash for Scalar {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        match self {
            Scalar::Null => state.write_u8(0),
            Scalar::Bool(b) => {
                state.write_u8(1);
                state.write_u8(*b as u8);
            }
            Scalar::Int(v) => {
                state.write_u8(2);
                state.write_i64(*v);
            }
            Scalar::Float(v) => {
                if v.fract() == 0.0 && v.abs() < 9.0e15 && *v != 0.0 {
                    state.write_u8(2);
                    state.write_i64(*v as i64);
                } else if *v == 0.0 && v.is_sign_positive() {
                    state.write_u8(2);
                    state.write_i64(0);
                } else {
                    state.write_u8(3);
                    state.write_u64(v.to_bits());
                }
            }
            Scalar::Str(s) => {
                state.write_u8(4);
                s.hash(state);
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Null => f.write_str("NULL"),
            Scalar::Int(v) => write!(f, "{v}"),
            Scalar::Float(v) => write!(f, "{v}"),
            Scalar::Str(v) => write!(f, "'{v}'"),
            Scalar::Bool(v) => write!(f, "{v}"),
        }
    }
}

/// Validity bitmap: bit set means the slot holds a value.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Bitmap {
    words: Vec<u64>,
    len: usize,
}

impl Bitmap {
    pub fn new_set(len: usize) -> Self {
        let mut words = vec![u64::MAX; len.div_ceil(64)];
        if len % 64 != 0 {
            if let Some(last) = words.last_mut() {
                *last = (1u64 << (len % 64)) - 1;
            }
        }
        Bitmap { words, len }
    }

    pub fn new_unset(len: usize) -> Self {
        Bitmap {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_bools(bits: impl IntoIterator<Item = bool>) -> Self {
        let mut map = Bitmap::default();
        for b in bits {
            map.push(b);
        }
        map
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        let (w, b) = (i / 64, i % 64);
        if value {
            self.words[w] |= 1 << b;
        } else {
            self.words[w] &= !(1 << b);
        }
    }

    pub fn push(&mut self, value: bool) {
        if self.len % 64 == 0 {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, value);
    }

    pub fn count_set(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn all_set(&self) -> bool {
        self.count_set() == self.len
    }

    pub fn as_words(&self) -> &[u64] {
        &self.words
    }

    pub fn from_words(words: Vec<u64>, len: usize) -> Self {
        Bitmap { words, len }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnValues {
    Int64(Vec<i64>),
    Float64(Vec<f64>),
    Utf8(Vec<Arc<str>>),
    Boolean(Vec<bool>),
}

macro_rules! dispatch {
    ($values:expr, $v:ident => $body:expr) => {
        match $values {
            ColumnValues::Int64($v) => $body,
            ColumnValues::Float64($v) => $body,
            ColumnValues::Utf8($v) => $body,
            ColumnValues::Boolean($v) => $body,
        }
    };
}

macro_rules! map_values {
    ($values:expr, $v:ident => $body:expr) => {
        match $values {
            ColumnValues::Int64($v) => ColumnValues::Int64($body),
            ColumnValues::Float64($v) => ColumnValues::Float64($body),
            ColumnValues::Utf8($v) => ColumnValues::Utf8($body),
            ColumnValues::Boolean($v) => ColumnValues::Boolean($body),
        }
    };
}

impl ColumnValues {
    pub fn len(&self) -> usize {
        dispatch!(self, v => v.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn logical_type(&self) -> LogicalType {
        match self {
            ColumnValues::Int64(_) => LogicalType::Int64,
            ColumnValues::Float64(_) => LogicalType::Float64,
            ColumnValues::Utf8(_) => LogicalType::Utf8,
            ColumnValues::Boolean(_) => LogicalType::Boolean,
        }
    }

    pub fn empty(ty: LogicalType) -> Self {
        Self::with_capacity(ty, 0)
    }

    pub fn with_capacity(ty: LogicalType, cap: usize) -> Self {
        match ty {
            LogicalType::Int64 => ColumnValues::Int64(Vec::with_capacity(cap)),
            LogicalType::Float64 => ColumnValues::Float64(Vec::with_capacity(cap)),
            LogicalType::Utf8 => ColumnValues::Utf8(Vec::with_capacity(cap)),
            LogicalType::Boolean => ColumnValues::Boolean(Vec::with_capacity(cap)),
        }
    }

    pub fn default_filled(ty: LogicalType, len: usize) -> Self {
        match ty {
            LogicalType::Int64 => ColumnValues::Int64(vec![0; len]),
            LogicalType::Float64 => ColumnValues::Float64(vec![0.0; len]),
            LogicalType::Utf8 => ColumnValues::Utf8(vec![Arc::from(""); len]),
            LogicalType::Boolean => ColumnValues::Boolean(vec![false; len]),
        }
    }

    pub fn scalar(&self, i: usize) -> Scalar {
        match self {
            ColumnValues::Int64(v) => Scalar::Int(v[i]),
            ColumnValues::Float64(v) => Scalar::Float(v[i]),
            ColumnValues::Utf8(v) => Scalar::Str(v[i].clone()),
            ColumnValues::Boolean(v) => Scalar::Bool(v[i]),
        }
    }

    pub fn take(&self, indices: &[u32]) -> ColumnValues {
        map_values!(self, v => indices.iter().map(|&i| v[i as usize].clone()).collect())
    }

    pub fn slice(&self, start: usize, end: usize) -> ColumnValues {
        map_values!(self, v => v[start..end].to_vec())
    }

    pub fn filter(&self, mask: &[bool]) -> ColumnValues {
        map_values!(self, v => v.iter().zip(mask).filter(|(_, &m)| m).map(|(x, _)| x.clone()).collect())
    }

    fn extend_from(&mut self, other: &ColumnValues) -> Result<()> {
        match (self, other) {
            (ColumnValues::Int64(a), ColumnValues::Int64(b)) => a.extend_from_slice(b),
            (ColumnValues::Float64(a), ColumnValues::Float64(b)) => a.extend_from_slice(b),
            (ColumnValues::Utf8(a), ColumnValues::Utf8(b)) => a.extend_from_slice(b),
            (ColumnValues::Boolean(a), ColumnValues::Boolean(b)) => a.extend_from_slice(b),
            (a, b) => {
                return Err(Error::schema(format!(
                    "cannot concatenate {} with {}",
                    a.logical_type(),
                    b.logical_type()
                )))
            }
        }
        Ok(())
    }

    /// Appends `value`; a null becomes the type's default (the caller tracks validity).
    pub fn push_scalar(&mut self, value: &Scalar) -> Result<()> {
        match (self, value) {
            (ColumnValues::Int64(v), Scalar::Int(x)) => v.push(*x),
            (ColumnValues::Float64(v), Scalar::Float(x)) => v.push(*x),
            (ColumnValues::Float64(v), Scalar::Int(x)) => v.push(*x as f64),
            (ColumnValues::Utf8(v), Scalar::Str(x)) => v.push(x.clone()),
            (ColumnValues::Boolean(v), Scalar::Bool(x)) => v.push(*x),
            (ColumnValues::Int64(v), Scalar::Null) => v.push(0),
            (ColumnValues::Float64(v), Scalar::Null) => v.push(0.0),
            (ColumnValues::Utf8(v), Scalar::Null) => v.push(Arc::from("")),
            (ColumnValues::Boolean(v), Scalar::Null) => v.push(false),
            (values, other) => {
                return Err(Error::schema(format!(
                    "cannot store {other} in a {} column",
                    values.logical_type()
                )))
            }
        }
        Ok(())
    }
}

/// Decoded column values plus an optional validity bitmap.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnData {
    pub values: ColumnValues,
    pub validity: Option<Bitmap>,
}

impl From<ColumnValues> for ColumnData {
    fn from(values: ColumnValues) -> Self {
        ColumnData {
            values,
            validity: None,
        }
    }
}

impl From<Vec<i64>> for ColumnData {
    fn from(v: Vec<i64>) -> Self {
        ColumnValues::Int64(v).into()
    }
}

impl From<Vec<f64>> for ColumnData {
    fn from(v: Vec<f64>) -> Self {
        ColumnValues::Float64(v).into()
    }
}

impl From<Vec<bool>> for ColumnData {
    fn from(v: Vec<bool>) -> Self {
        ColumnValues::Boolean(v).into()
    }
}

impl From<Vec<&str>> for ColumnData {
    fn from(v: Vec<&str>) -> Self {
        ColumnValues::Utf8(v.into_iter().map(Arc::from).collect()).into()
    }
}

impl ColumnData {
    pub fn new(values: ColumnValues, validity: Option<Bitmap>) -> Self {
        let validity = validity.filter(|b| !b.all_set());
        ColumnData { values, validity }
    }

    pub fn nulls(ty: LogicalType, len: usize) -> Self {
        ColumnData {
            values: ColumnValues::default_filled(ty, len),
            validity: Some(Bitmap::new_unset(len)),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn logical_type(&self) -> LogicalType {
        self.values.logical_type()
    }

    #[inline]
    pub fn is_null(&self, i: usize) -> bool {
        self.validity.as_ref().is_some_and(|b| !b.get(i))
    }

    pub fn null_count(&self) -> usize {
        self.validity
            .as_ref()
            .map_or(0, |b| b.len() - b.count_set())
    }

    pub fn scalar(&self, i: usize) -> Scalar {
        if self.is_null(i) {
            Scalar::Null
        } else {
            self.values.scalar(i)
        }
    }

    pub fn as_i64(&self) -> Option<&[i64]> {
        match &self.values {
            ColumnValues::Int64(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<&[f64]> {
        match &self.values {
            ColumnValues::Float64(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&[Arc<str>]> {
        match &self.values {
            ColumnValues::Utf8(v) => Some(v),
            _ => None,
        }
    }

    pub fn take(&self, indices: &[u32]) -> ColumnData {
        let validity = self
            .validity
            .as_ref()
            .map(|b| Bitmap::from_bools(indices.iter().map(|&i| b.get(i as usize))));
        ColumnData::new(self.values.take(indices), validity)
    }

    /// Gather where `None` produces a null slot (outer-join padding).
    pub fn take_opt(&self, indices: &[Option<u32>]) -> ColumnData {
        let dense: Vec<u32> = indices.iter().map(|i| i.unwrap_or(0)).collect();
        let any_missing = indices.iter().any(Option::is_none);
        if self.is_empty() {
            return ColumnData::nulls(self.logical_type(), indices.len());
        }
        let mut out = self.take(&dense);
        if any_missing || out.validity.is_some() {
            let mut bits = out
                .validity
                .take()
                .unwrap_or_else(|| Bitmap::new_set(indices.len()));
            for (slot, idx) in indices.iter().enumerate() {
                if idx.is_none() {
                    bits.set(slot, false);
                }
            }
            out.validity = Some(bits).filter(|b| !b.all_set());
        }
        out
    }

    pub fn slice(&self, start: usize, end: usize) -> ColumnData {
        let validity = self
            .validity
            .as_ref()
            .map(|b| Bitmap::from_bools((start..end).map(|i| b.get(i))));
        ColumnData::new(self.values.slice(start, end), validity)
    }

    pub fn filter(&self, mask: &[bool]) -> ColumnData {
        let validity = self.validity.as_ref().map(|b| {
            Bitmap::from_bools(
                mask.iter()
                    .enumerate()
                    .filter(|(_, &m)| m)
                    .map(|(i, _)| b.get(i)),
            )
        });
        ColumnData::new(self.values.filter(mask), validity)
    }

    pub fn concat(ty: LogicalType, parts: &[&ColumnData]) -> Result<ColumnData> {
        let total: usize = parts.iter().map(|p| p.len()).sum();
        let mut values = ColumnValues::with_capacity(ty, total);
        let any_nulls = parts.iter().any(|p| p.validity.is_some());
        let mut validity = any_nulls.then(|| Bitmap::new_set(0));
        for part in parts {
            values.extend_from(&part.values)?;
            if let Some(bits) = validity.as_mut() {
                for i in 0..part.len() {
                    bits.push(!part.is_null(i));
                }
            }
        }
        Ok(ColumnData::new(values, validity))
    }

    pub fn from_scalars(ty: LogicalType, scalars: &[Scalar]) -> Result<ColumnData> {
        let mut values = ColumnValues::with_capacity(ty, scalars.len());
        let mut validity = Bitmap::new_set(0);
        for s in scalars {
            values.push_scalar(s)?;
            validity.push(!s.is_null());
        }
        Ok(ColumnData::new(values, Some(validity)))
    }

    /// Bytes the storage counters attribute to reading this column.
    pub fn byte_size(&self) -> usize {
        let base = match &self.values {
            ColumnValues::Utf8(v) => v.iter().map(|s| s.len() + 4).sum(),
            other => other.len() * other.logical_type().width(),
        };
        base + self.validity.as_ref().map_or(0, |b| b.len().div_ceil(8))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Encoding {
    Plain,
    RunLength,
    Dictionary,
    Delta,
}

impl Encoding {
    pub const ALL: [Encoding; 4] = [
        Encoding::Plain,
        Encoding::RunLength,
        Encoding::Dictionary,
        Encoding::Delta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Encoding::Plain => "plain",
            Encoding::RunLength => "run_length",
            Encoding::Dictionary => "dictionary",
            Encoding::Delta => "delta",
        }
    }

    pub fn applies_to(self, ty: LogicalType) -> bool {
        match self {
            Encoding::Delta => ty == LogicalType::Int64,
            _ => ty != LogicalType::Boolean,
        }
    }
}

/// A named column inside a [`ColumnTable`]. Data is shared, never mutated.
#[derive(Debug, Clone)]
pub struct Column {
    pub name: String,
    pub data: Arc<ColumnData>,
    /// Preferred on-disk encoding; in-memory values are always decoded.
    pub encoding: Encoding,
}

impl Column {
    pub fn new(name: impl Into<String>, data: impl Into<ColumnData>) -> Self {
        Column {
            name: name.into(),
            data: Arc::new(data.into()),
            encoding: Encoding::Plain,
        }
    }

    pub fn with_encoding(mut self, encoding: Encoding) -> Self {
        self.encoding = encoding;
        self
    }

    pub fn logical_type(&self) -> LogicalType {
        self.data.logical_type()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
}

impl PartialEq for Column {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && *self.data == *other.data
    }
}
