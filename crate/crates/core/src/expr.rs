// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

//! Scalar expressions evaluated column-at-a-time over batches.
//!
//! Integer arithmetic saturates, so adding to the `i64::MAX` "unreached"
//! sentinel leaves it unchanged. Division by zero yields null.

use std::fmt;
use std::sync::Arc;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::exec::batch::{Batch, Schema};
use crate::storage::{Bitmap, ColumnData, ColumnValues, LogicalType, Scalar};

/// Named query parameters such as the vertex count `n`.
pub type Params = FxHashMap<String, Scalar>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Eq,
    NotEq,
    Lt,
    LtEq,
    Gt,
    GtEq,
    And,
    Or,
}

impl BinaryOp {
    fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Eq => "=",
            BinaryOp::NotEq => "<>",
            BinaryOp::Lt => "<",
            BinaryOp::LtEq => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::GtEq => ">=",
            BinaryOp::And => "AND",
            BinaryOp::Or => "OR",
        }
    }

    fn is_arithmetic(self) -> bool {
        matches!(
            self,
            BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div
        )
    }

    fn is_comparison(self) -> bool {
        matches!(
            self,
            BinaryOp::Eq
                | BinaryOp::NotEq
                | BinaryOp::Lt
                | BinaryOp::LtEq
                | BinaryOp::Gt
                | BinaryOp::GtEq
        )
    }

    fn commutes(self) -> bool {
        matches!(
            self,
            BinaryOp::Add
                | BinaryOp::Mul
                | BinaryOp::Eq
                | BinaryOp::NotEq
                | BinaryOp::And
                | BinaryOp::Or
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Column(String),
    Literal(Scalar),
    Param(String),
    Binary {
        op: BinaryOp,
        left: Box<Expr>,
        right: Box<Expr>,
    },
    Not(Box<Expr>),
    IsNull(Box<Expr>),
    /// First non-null argument.
    Coalesce(Vec<Expr>),
    Case {
        when: Box<Expr>,
        then: Box<Expr>,
        otherwise: Box<Expr>,
    },
    /// `floor` for floats, identity for integers; result is int64.
    Floor(Box<Expr>),
    /// Smaller of two numbers.
    Least(Box<Expr>, Box<Expr>),
}

pub fn col(name: &str) -> Expr {
    Expr::Column(name.to_string())
}

pub fn lit(value: impl Into<Scalar>) -> Expr {
    Expr::Literal(value.into())
}

pub fn param(name: &str) -> Expr {
    Expr::Param(name.to_string())
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::Int(v)
    }
}

impl From<f64> for Scalar {
    fn from(v: f64) -> Self {
        Scalar::Float(v)
    }
}

impl From<&str> for Scalar {
    fn from(v: &str) -> Self {
        Scalar::str(v)
    }
}

impl From<bool> for Scalar {
    fn from(v: bool) -> Self {
        Scalar::Bool(v)
    }
}

macro_rules! binary_ctor {
    ($($name:ident => $op:ident),* $(,)?) => {
        impl Expr {
            $(
                #[allow(clippy::should_implement_trait)]
                pub fn $name(self, other: Expr) -> Expr {
                    Expr::Binary { op: BinaryOp::$op, left: Box::new(self), right: Box::new(other) }
                }
            )*
        }
    };
}

binary_ctor! {
    add => Add, sub => Sub, mul => Mul, div => Div,
    eq => Eq, not_eq => NotEq, lt => Lt, lt_eq => LtEq, gt => Gt, gt_eq => GtEq,
    and => And, or => Or,
}

impl Expr {
    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Expr {
        Expr::Not(Box::new(self))
    }

    pub fn is_null(self) -> Expr {
        Expr::IsNull(Box::new(self))
    }

    pub fn case(when: Expr, then: Expr, otherwise: Expr) -> Expr {
        Expr::Case {
            when: Box::new(when),
            then: Box::new(then),
            otherwise: Box::new(otherwise),
        }
    }

    /// Every column name referenced, in first-appearance order.
    pub fn columns(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.visit(&mut |e| {
            if let Expr::Column(c) = e {
                if !out.contains(&c.as_str()) {
                    out.push(c.as_str());
                }
            }
        });
        out
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::Column(_) | Expr::Literal(_) | Expr::Param(_) => {}
            Expr::Binary { left, right, .. } | Expr::Least(left, right) => {
                left.visit(f);
                right.visit(f);
            }
            Expr::Not(e) | Expr::IsNull(e) | Expr::Floor(e) => e.visit(f),
            Expr::Coalesce(args) => args.iter().for_each(|a| a.visit(f)),
            Expr::Case {
                when,
                then,
                otherwise,
            } => {
                when.visit(f);
                then.visit(f);
                otherwise.visit(f);
            }
        }
    }

    /// Rewrites column references through `f` (returning `None` keeps the name).
    pub fn map_columns(&self, f: &impl Fn(&str) -> Option<Expr>) -> Expr {
        let rec = |e: &Expr| Box::new(e.map_columns(f));
        match self {
            Expr::Column(c) => f(c).unwrap_or_else(|| self.clone()),
            Expr::Literal(_) | Expr::Param(_) => self.clone(),
            Expr::Binary { op, left, right } => Expr::Binary {
                op: *op,
                left: rec(left),
                right: rec(right),
            },
            Expr::Not(e) => Expr::Not(rec(e)),
            Expr::IsNull(e) => Expr::IsNull(rec(e)),
            Expr::Floor(e) => Expr::Floor(rec(e)),
            Expr::Least(a, b) => Expr::Least(rec(a), rec(b)),
            Expr::Coalesce(args) => Expr::Coalesce(args.iter().map(|a| a.map_columns(f)).collect()),
            Expr::Case {
                when,
                then,
                otherwise,
            } => Expr::Case {
                when: rec(when),
                then: rec(then),
                otherwise: rec(otherwise),
            },
        }
    }

    /// Canonical form for structural comparison: operands of commutative
    /// operators ordered by their printed form.
    pub fn canonical(&self) -> Expr {
        match self {
            Expr::Binary { op, left, right } => {
                let (l, r) = (left.canonical(), right.canonical());
                let (l, r) = if op.commutes() && l.to_string() > r.to_string() {
                    (r, l)
                } else {
                    (l, r)
                };
                Expr::Binary {
                    op: *op,
                    left: Box::new(l),
                    right: Box::new(r),
                }
            }
            other => other.map_children(Expr::canonical),
        }
    }

    fn map_children(&self, f: impl Fn(&Expr) -> Expr) -> Expr {
        match self {
            Expr::Column(_) | Expr::Literal(_) | Expr::Param(_) => self.clone(),
            Expr::Binary { op, left, right } => Expr::Binary {
                op: *op,
                left: Box::new(f(left)),
                right: Box::new(f(right)),
            },
            Expr::Not(e) => Expr::Not(Box::new(f(e))),
            Expr::IsNull(e) => Expr::IsNull(Box::new(f(e))),
            Expr::Floor(e) => Expr::Floor(Box::new(f(e))),
            Expr::Least(a, b) => Expr::Least(Box::new(f(a)), Box::new(f(b))),
            Expr::Coalesce(args) => Expr::Coalesce(args.iter().map(&f).collect()),
            Expr::Case {
                when,
                then,
                otherwise,
            } => Expr::Case {
                when: Box::new(f(when)),
                then: Box::new(f(then)),
                otherwise: Box::new(f(otherwise)),
            },
        }
    }

    /// Result type against `schema`; collects every unresolved name into `errors`.
    pub fn check(
        &self,
        schema: &Schema,
        params: &Params,
        errors: &mut Vec<String>,
    ) -> Option<LogicalType> {
        match self {
            Expr::Column(c) => match schema.index_of(c) {
                Some(i) => Some(schema.field(i).ty),
                None => {
                    errors.push(format!("unresolved column {c} in {schema}"));
                    None
                }
            },
            Expr::Literal(s) => match s.logical_type() {
                Some(t) => Some(t),
                None => {
                    errors.push("untyped NULL literal".into());
                    None
                }
            },
            Expr::Param(p) => match params.get(p).and_then(Scalar::logical_type) {
                Some(t) => Some(t),
                None => {
                    errors.push(format!("unbound parameter {p}"));
                    None
                }
            },
            Expr::Binary { op, left, right } => {
                let l = left.check(schema, params, errors);
                let r = right.check(schema, params, errors);
                let (l, r) = (l?, r?);
                if op.is_arithmetic() {
                    if !l.is_numeric() || !r.is_numeric() {
                        errors.push(format!("arithmetic on {l} and {r} in {self}"));
                        return None;
                    }
                    Some(numeric_result(l, r))
                } else if op.is_comparison() {
                    if l != r && !(l.is_numeric() && r.is_numeric()) {
                        errors.push(format!("cannot compare {l} with {r} in {self}"));
                        return None;
                    }
                    Some(LogicalType::Boolean)
                } else {
                    if l != LogicalType::Boolean || r != LogicalType::Boolean {
                        errors.push(format!("{} needs boolean operands in {self}", op.symbol()));
                        return None;
                    }
                    Some(LogicalType::Boolean)
                }
            }
            Expr::Not(e) => {
                let t = e.check(schema, params, errors)?;
                if t != LogicalType::Boolean {
                    errors.push(format!("NOT needs a boolean in {self}"));
                    return None;
                }
                Some(LogicalType::Boolean)
            }
            Expr::IsNull(e) => {
                e.check(schema, params, errors);
                Some(LogicalType::Boolean)
            }
            Expr::Floor(e) => {
                let t = e.check(schema, params, errors)?;
                if !t.is_numeric() {
                    errors.push(format!("FLOOR needs a number in {self}"));
                    return None;
                }
                Some(LogicalType::Int64)
            }
            Expr::Least(a, b) => {
                let (a, b) = (
                    a.check(schema, params, errors),
                    b.check(schema, params, errors),
                );
                let (a, b) = (a?, b?);
                if !a.is_numeric() || !b.is_numeric() {
                    errors.push(format!("LEAST needs numbers in {self}"));
                    return None;
                }
                Some(numeric_result(a, b))
            }
            Expr::Coalesce(args) => {
                let types: Vec<Option<LogicalType>> = args
                    .iter()
                    .map(|a| a.check(schema, params, errors))
                    .collect();
                unify(&types, self, errors)
            }
            Expr::Case {
                when,
                then,
                otherwise,
            } => {
                if let Some(t) = when.check(schema, params, errors) {
                    if t != LogicalType::Boolean {
                        errors.push(format!("CASE condition is not boolean in {self}"));
                    }
                }
                let types = [
                    then.check(schema, params, errors),
                    otherwise.check(schema, params, errors),
                ];
                unify(&types, self, errors)
            }
        }
    }

    pub fn data_type(&self, schema: &Schema, params: &Params) -> Result<LogicalType> {
        let mut errors = Vec::new();
        match self.check(schema, params, &mut errors) {
            Some(t) if errors.is_empty() => Ok(t),
            _ => Err(Error::Validation(errors)),
        }
    }

    pub fn eval(&self, batch: &Batch, params: &Params) -> Result<Arc<ColumnData>> {
        let n = batch.len();
        Ok(match self {
            Expr::Column(c) => batch.column(batch.schema.resolve(c)?).clone(),
            Expr::Literal(s) => Arc::new(broadcast(s, n)?),
            Expr::Param(p) => {
                let v = params
                    .get(p)
                    .ok_or_else(|| Error::plan(format!("unbound parameter {p}")))?;
                Arc::new(broadcast(v, n)?)
            }
            Expr::Binary { op, left, right } => {
                let l = left.eval(batch, params)?;
                let r = right.eval(batch, params)?;
                Arc::new(eval_binary(*op, &l, &r)?)
            }
            Expr::Not(e) => {
                let v = e.eval(batch, params)?;
                let b = bools(&v)?;
                Arc::new(ColumnData::new(
                    ColumnValues::Boolean(b.iter().map(|x| !x).collect()),
                    v.validity.clone(),
                ))
            }
            Expr::IsNull(e) => {
                let v = e.eval(batch, params)?;
                Arc::new(ColumnData::from(ColumnValues::Boolean(
                    (0..n).map(|i| v.is_null(i)).collect(),
                )))
            }
            Expr::Floor(e) => {
                let v = e.eval(batch, params)?;
                let out = match &v.values {
                    ColumnValues::Int64(x) => x.clone(),
                    ColumnValues::Float64(x) => x.iter().map(|f| f.floor() as i64).collect(),
                    _ => return Err(Error::schema("FLOOR needs a number")),
                };
                Arc::new(ColumnData::new(
                    ColumnValues::Int64(out),
                    v.validity.clone(),
                ))
            }
            Expr::Least(a, b) => {
                let (a, b) = (a.eval(batch, params)?, b.eval(batch, params)?);
                Arc::new(numeric_zip(&a, &b, i64::min, f64::min)?)
            }
            Expr::Coalesce(args) => {
                let vals = args
                    .iter()
                    .map(|a| a.eval(batch, params))
                    .collect::<Result<Vec<_>>>()?;
                Arc::new(coalesce(&vals, n)?)
            }
            Expr::Case {
                when,
                then,
                otherwise,
            } => {
                let w = when.eval(batch, params)?;
                let t = then.eval(batch, params)?;
                let o = otherwise.eval(batch, params)?;
                let cond = bools(&w)?;
                let pick: Vec<Arc<ColumnData>> = vec![t, o];
                let ty = common_type(pick[0].logical_type(), pick[1].logical_type())?;
                let scalars: Vec<Scalar> = (0..n)
                    .map(|i| {
                        let src = if cond[i] && !w.is_null(i) {
                            &pick[0]
                        } else {
                            &pick[1]
                        };
                        cast_scalar(src.scalar(i), ty)
                    })
                    .collect();
                Arc::new(ColumnData::from_scalars(ty, &scalars)?)
            }
        })
    }

    /// Evaluates a predicate to a row mask; null counts as false.
    pub fn eval_mask(&self, batch: &Batch, params: &Params) -> Result<Vec<bool>> {
        let v = self.eval(batch, params)?;
        let b = bools(&v)?;
        Ok(match &v.validity {
            None => b.to_vec(),
            Some(bits) => b
                .iter()
                .enumerate()
                .map(|(i, &x)| x && bits.get(i))
                .collect(),
        })
    }
}

fn numeric_result(a: LogicalType, b: LogicalType) -> LogicalType {
    if a == LogicalType::Int64 && b == LogicalType::Int64 {
        LogicalType::Int64
    } else {
        LogicalType::Float64
    }
}

fn common_type(a: LogicalType, b: LogicalType) -> Result<LogicalType> {
    if a == b {
        Ok(a)
    } else if a.is_numeric() && b.is_numeric() {
        Ok(LogicalType::Float64)
    } else {
        Err(Error::schema(format!("no common type for {a} and {b}")))
    }
}

fn unify(types: &[Option<LogicalType>], e: &Expr, errors: &mut Vec<String>) -> Option<LogicalType> {
    let mut out: Option<LogicalType> = None;
    for t in types {
        let t = (*t)?;
        out = Some(match out {
            None => t,
            Some(prev) => match common_type(prev, t) {
                Ok(c) => c,
                Err(_) => {
                    errors.push(format!("mixed types {prev} and {t} in {e}"));
                    return None;
                }
            },
        });
    }
    out
}

fn cast_scalar(s: Scalar, ty: LogicalType) -> Scalar {
    match (s, ty) {
        (Scalar::Int(v), LogicalType::Float64) => Scalar::Float(v as f64),
        (s, _) => s,
    }
}

fn broadcast(s: &Scalar, n: usize) -> Result<ColumnData> {
    Ok(match s {
        Scalar::Int(v) => ColumnData::from(vec![*v; n]),
        Scalar::Float(v) => ColumnData::from(vec![*v; n]),
        Scalar::Bool(v) => ColumnData::from(ColumnValues::Boolean(vec![*v; n])),
        Scalar::Str(v) => ColumnData::from(ColumnValues::Utf8(vec![v.clone(); n])),
        Scalar::Null => return Err(Error::schema("untyped NULL literal")),
    })
}

fn bools(v: &ColumnData) -> Result<&[bool]> {
    match &v.values {
        ColumnValues::Boolean(b) => Ok(b),
        other => Err(Error::schema(format!(
            "expected boolean, found {}",
            other.logical_type()
        ))),
    }
}

fn merge_validity(a: &ColumnData, b: &ColumnData) -> Option<Bitmap> {
    match (&a.validity, &b.validity) {
        (None, None) => None,
        (Some(x), None) | (None, Some(x)) => Some(x.clone()),
        (Some(x), Some(y)) => Some(Bitmap::from_bools(
            (0..x.len()).map(|i| x.get(i) && y.get(i)),
        )),
    }
}

fn as_float(v: &ColumnData) -> Option<std::borrow::Cow<'_, [f64]>> {
    match &v.values {
        ColumnValues::Float64(x) => Some(std::borrow::Cow::Borrowed(x)),
        ColumnValues::Int64(x) => Some(std::borrow::Cow::Owned(
            x.iter().map(|&i| i as f64).collect(),
        )),
        _ => None,
    }
}

fn numeric_zip(
    a: &ColumnData,
    b: &ColumnData,
    fi: impl Fn(i64, i64) -> i64,
    ff: impl Fn(f64, f64) -> f64,
) -> Result<ColumnData> {
    let validity = merge_validity(a, b);
    if let (Some(x), Some(y)) = (a.as_i64(), b.as_i64()) {
        let out = x.iter().zip(y).map(|(&p, &q)| fi(p, q)).collect();
        return Ok(ColumnData::new(ColumnValues::Int64(out), validity));
    }
    match (as_float(a), as_float(b)) {
        (Some(x), Some(y)) => {
            let out = x.iter().zip(y.iter()).map(|(&p, &q)| ff(p, q)).collect();
            Ok(ColumnData::new(ColumnValues::Float64(out), validity))
        }
        _ => Err(Error::schema(format!(
            "arithmetic on {} and {}",
            a.logical_type(),
            b.logical_type()
        ))),
    }
}

fn eval_binary(op: BinaryOp, a: &ColumnData, b: &ColumnData) -> Result<ColumnData> {
    match op {
        BinaryOp::Add => numeric_zip(a, b, i64::saturating_add, |x, y| x + y),
        BinaryOp::Sub => numeric_zip(a, b, i64::saturating_sub, |x, y| x - y),
        BinaryOp::Mul => numeric_zip(a, b, i64::saturating_mul, |x, y| x * y),
        BinaryOp::Div => {
            let mut out = numeric_zip(
                a,
                b,
                |x, y| if y == 0 { 0 } else { x.wrapping_div(y) },
                |x, y| x / y,
            )?;
            let zero: Vec<bool> = match &b.values {
                ColumnValues::Int64(y) => y.iter().map(|&v| v == 0).collect(),
                ColumnValues::Float64(y) => y.iter().map(|&v| v == 0.0).collect(),
                _ => unreachable!("checked numeric"),
            };
            if zero.iter().any(|&z| z) {
                let mut bits = out
                    .validity
                    .take()
                    .unwrap_or_else(|| Bitmap::new_set(zero.len()));
                for (i, z) in zero.iter().enumerate() {
                    if *z {
                        bits.set(i, false);
                    }
                }
                out = ColumnData::new(out.values, Some(bits));
            }
            Ok(out)
        }
        BinaryOp::And | BinaryOp::Or => {
            let (x, y) = (bools(a)?, bools(b)?);
            let is_and = op == BinaryOp::And;
            let mut vals = Vec::with_capacity(x.len());
            let mut valid = Vec::with_capacity(x.len());
            for i in 0..x.len() {
                let (an, bn) = (a.is_null(i), b.is_null(i));
                let (av, bv) = (x[i], y[i]);
                // Kleene logic: a known dominant operand decides the result.
                let dominant = !is_and;
                let (v, ok) = if (!an && av == dominant) || (!bn && bv == dominant) {
                    (dominant, true)
                } else if an || bn {
                    (false, false)
                } else if is_and {
                    (av && bv, true)
                } else {
                    (av || bv, true)
                };
                vals.push(v);
                valid.push(ok);
            }
            Ok(ColumnData::new(
                ColumnValues::Boolean(vals),
                Some(Bitmap::from_bools(valid)),
            ))
        }
        _ => {
            let validity = merge_validity(a, b);
            let test = |o: std::cmp::Ordering| match op {
                BinaryOp::Eq => o.is_eq(),
                BinaryOp::NotEq => o.is_ne(),
                BinaryOp::Lt => o.is_lt(),
                BinaryOp::LtEq => o.is_le(),
                BinaryOp::Gt => o.is_gt(),
                BinaryOp::GtEq => o.is_ge(),
                _ => unreachable!(),
            };
            let out: Vec<bool> = match (&a.values, &b.values) {
                (ColumnValues::Int64(x), ColumnValues::Int64(y)) => {
                    x.iter().zip(y).map(|(p, q)| test(p.cmp(q))).collect()
                }
                (ColumnValues::Float64(x), ColumnValues::Float64(y)) => x
                    .iter()
                    .zip(y)
                    .map(|(p, q)| p.partial_cmp(q).is_some_and(test))
                    .collect(),
                _ => {
                    if a.logical_type() != b.logical_type()
                        && !(a.logical_type().is_numeric() && b.logical_type().is_numeric())
                    {
                        return Err(Error::schema(format!(
                            "cannot compare {} with {}",
                            a.logical_type(),
                            b.logical_type()
                        )));
                    }
                    (0..a.len())
                        .map(|i| test(a.values.scalar(i).cmp(&b.values.scalar(i))))
                        .collect()
                }
            };
            Ok(ColumnData::new(ColumnValues::Boolean(out), validity))
        }
    }
}

fn coalesce(vals: &[Arc<ColumnData>], n: usize) -> Result<ColumnData> {
    let ty = vals
        .iter()
        .map(|v| v.logical_type())
        .try_fold(None::<LogicalType>, |acc, t| match acc {
            None => Ok(Some(t)),
            Some(p) => common_type(p, t).map(Some),
        })?
        .ok_or_else(|| Error::schema("COALESCE needs arguments"))?;
    if let Some(first) = vals.first() {
        if first.validity.is_none() && first.logical_type() == ty {
            return Ok(first.as_ref().clone());
        }
    }
    // Fast path for the outer-join pattern: same numeric type throughout.
    if vals.iter().all(|v| v.logical_type() == ty) {
        if let Some(out) = coalesce_same(vals, n) {
            return Ok(out);
        }
    }
    let scalars: Vec<Scalar> = (0..n)
        .map(|i| {
            vals.iter()
                .map(|v| v.scalar(i))
                .find(|s| !s.is_null())
                .map_or(Scalar::Null, |s| cast_scalar(s, ty))
        })
        .collect();
    ColumnData::from_scalars(ty, &scalars)
}

fn coalesce_same(vals: &[Arc<ColumnData>], n: usize) -> Option<ColumnData> {
    let mut out = vals[0].as_ref().clone();
    let mut bits = out.validity.take()?;
    for v in &vals[1..] {
        for i in 0..n {
            if !bits.get(i) && !v.is_null(i) {
                match (&mut out.values, &v.values) {
                    (ColumnValues::Int64(o), ColumnValues::Int64(s)) => o[i] = s[i],
                    (ColumnValues::Float64(o), ColumnValues::Float64(s)) => o[i] = s[i],
                    (ColumnValues::Utf8(o), ColumnValues::Utf8(s)) => o[i] = s[i].clone(),
                    (ColumnValues::Boolean(o), ColumnValues::Boolean(s)) => o[i] = s[i],
                    _ => return None,
                }
                bits.set(i, true);
            }
        }
    }
    Some(ColumnData::new(out.values, Some(bits)))
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Column(c) => f.write_str(c),
            Expr::Literal(s) => write!(f, "{s}"),
            Expr::Param(p) => write!(f, ":{p}"),
            Expr::Binary { op, left, right } => write!(f, "({left} {} {right})", op.symbol()),
            Expr::Not(e) => write!(f, "NOT {e}"),
            Expr::IsNull(e) => write!(f, "{e} IS NULL"),
            Expr::Floor(e) => write!(f, "FLOOR({e})"),
            Expr::Least(a, b) => write!(f, "LEAST({a}, {b})"),
            Expr::Coalesce(args) => {
                let parts: Vec<String> = args.iter().map(ToString::to_string).collect();
                write!(f, "COALESCE({})", parts.join(", "))
            }
            Expr::Case {
                when,
                then,
                otherwise,
            } => write!(f, "CASE WHEN {when} THEN {then} ELSE {otherwise} END"),
        }
    }
}
