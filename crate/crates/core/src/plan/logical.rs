// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

use std::fmt;

use crate::error::{Error, Result};
use crate::exec::batch::Schema;
use crate::expr::{Expr, Params};
use crate::storage::{Catalog, LogicalType, TableRole};

#[derive(Debug, Clone, PartialEq)]
pub struct ScanNode {
    pub table: String,
    pub alias: String,
    pub role: TableRole,
    /// Physical projection to read; `None` lets the executor pick one.
    pub projection: Option<String>,
    pub predicate: Option<Expr>,
    /// Columns that receive SIP filters from enclosing hash joins.
    pub sip: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JoinKind {
    Inner,
    LeftOuter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BuildSide {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JoinMethod {
    Unchosen,
    Hash { build: BuildSide },
    Merge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JoinNode {
    pub kind: JoinKind,
    pub method: JoinMethod,
    pub left: Box<Plan>,
    pub right: Box<Plan>,
    /// Equality keys as `(left column, right column)`.
    pub on: Vec<(String, String)>,
    /// Publish the build side's keys to the probe-side scan.
    pub sip: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AggFunc {
    Min,
    Max,
    Sum,
    /// `COUNT(*)` without an argument, `COUNT(expr)` (non-null) with one.
    Count,
    /// `SUM(CASE WHEN arg IS NULL THEN 1 ELSE 0 END)`.
    CountNull,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggExpr {
    pub func: AggFunc,
    pub arg: Option<Expr>,
    pub name: String,
}

impl AggExpr {
    pub fn new(func: AggFunc, arg: Expr, name: &str) -> Self {
        AggExpr {
            func,
            arg: Some(arg),
            name: name.to_string(),
        }
    }

    pub fn count_star(name: &str) -> Self {
        AggExpr {
            func: AggFunc::Count,
            arg: None,
            name: name.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggNode {
    pub input: Box<Plan>,
    pub keys: Vec<String>,
    pub aggs: Vec<AggExpr>,
    pub having: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum VertexComputeKind {
    Sssp {
        weighted: bool,
    },
    Cc,
    PageRank,
    /// An arbitrary program; only the vertex runtimes can execute it.
    Opaque(String),
}

impl VertexComputeKind {
    pub fn name(&self) -> &str {
        match self {
            VertexComputeKind::Sssp { .. } => "sssp",
            VertexComputeKind::Cc => "cc",
            VertexComputeKind::PageRank => "pagerank",
            VertexComputeKind::Opaque(name) => name,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VertexComputeNode {
    pub kind: VertexComputeKind,
    /// Rows pairing each receiving vertex with one inbound message.
    pub input: Box<Plan>,
    /// Receiving vertex id and value columns of `input`.
    pub vertex_id: String,
    pub vertex_value: String,
    /// The message value, over `input` columns.
    pub message: Expr,
    /// Edge scan used to emit the next message table M′; `None` once the
    /// message table has been eliminated.
    pub emit_messages: Option<Box<Plan>>,
    /// Table whose rows send messages along their out-edges, scanned as
    /// `v2` once the message table is eliminated.
    pub sender_table: String,
    /// Message expression over the sender (`v2.*`) and edge (`e.*`), used
    /// when emitting M′ and when pushing the compute into the join.
    pub send: Expr,
    pub mutates_structure: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Plan {
    Scan(ScanNode),
    Filter {
        input: Box<Plan>,
        predicate: Expr,
    },
    Project {
        input: Box<Plan>,
        exprs: Vec<(Expr, String)>,
    },
    Join(JoinNode),
    GroupByAgg(AggNode),
    VertexCompute(VertexComputeNode),
    Union(Vec<Plan>),
    ReplaceSink {
        input: Box<Plan>,
        table: String,
    },
    UpdateSink {
        input: Box<Plan>,
        table: String,
        key: String,
        value: String,
    },
}

pub fn scan(table: &str, alias: &str, role: TableRole) -> Plan {
    Plan::Scan(ScanNode {
        table: table.to_string(),
        alias: alias.to_string(),
        role,
        projection: None,
        predicate: None,
        sip: Vec::new(),
    })
}

pub fn join(left: Plan, right: Plan, on: &[(&str, &str)]) -> Plan {
    Plan::Join(JoinNode {
        kind: JoinKind::Inner,
        method: JoinMethod::Unchosen,
        left: Box::new(left),
        right: Box::new(right),
        on: on
            .iter()
            .map(|(l, r)| (l.to_string(), r.to_string()))
            .collect(),
        sip: false,
    })
}

pub fn left_join(left: Plan, right: Plan, on: &[(&str, &str)]) -> Plan {
    match join(left, right, on) {
        Plan::Join(mut j) => {
            j.kind = JoinKind::LeftOuter;
            Plan::Join(j)
        }
        _ => unreachable!(),
    }
}

impl Plan {
    pub fn filter(self, predicate: Expr) -> Plan {
        Plan::Filter {
            input: Box::new(self),
            predicate,
        }
    }

    pub fn project(self, exprs: Vec<(Expr, &str)>) -> Plan {
        Plan::Project {
            input: Box::new(self),
            exprs: exprs.into_iter().map(|(e, n)| (e, n.to_string())).collect(),
        }
    }

    pub fn aggregate(self, keys: &[&str], aggs: Vec<AggExpr>, having: Option<Expr>) -> Plan {
        Plan::GroupByAgg(AggNode {
            input: Box::new(self),
            keys: keys.iter().map(|k| k.to_string()).collect(),
            aggs,
            having,
        })
    }

    /// Sets the projection read by a scan; no-op on other nodes.
    pub fn via(mut self, projection: &str) -> Plan {
        if let Plan::Scan(s) = &mut self {
            s.projection = Some(projection.to_string());
        }
        self
    }

    /// Sets the physical method of a join; no-op on other nodes.
    pub fn with_method(mut self, method: JoinMethod) -> Plan {
        if let Plan::Join(j) = &mut self {
            j.method = method;
        }
        self
    }

    /// Publishes a hash join's build keys to probe-side scans; no-op on
    /// other nodes.
    pub fn with_sip(mut self) -> Plan {
        if let Plan::Join(j) = &mut self {
            j.sip = true;
        }
        self
    }

    /// Adds a scan predicate; no-op on other nodes.
    pub fn with_predicate(mut self, predicate: Expr) -> Plan {
        if let Plan::Scan(s) = &mut self {
            s.predicate = Some(predicate);
        }
        self
    }

    pub fn children(&self) -> Vec<&Plan> {
        match self {
            Plan::Scan(_) => vec![],
            Plan::Filter { input, .. }
            | Plan::Project { input, .. }
            | Plan::ReplaceSink { input, .. }
            | Plan::UpdateSink { input, .. } => vec![input],
            Plan::GroupByAgg(a) => vec![&a.input],
            Plan::Join(j) => vec![&j.left, &j.right],
            Plan::VertexCompute(v) => {
                let mut c = vec![v.input.as_ref()];
                c.extend(v.emit_messages.as_deref());
                c
            }
            Plan::Union(inputs) => inputs.iter().collect(),
        }
    }

    /// Applies `f` to each direct child.
    pub fn map_children(&self, f: &mut impl FnMut(&Plan) -> Result<Plan>) -> Result<Plan> {
        let mut b = |p: &Plan| f(p).map(Box::new);
        Ok(match self {
            Plan::Scan(_) => self.clone(),
            Plan::Filter { input, predicate } => Plan::Filter {
                input: b(input)?,
                predicate: predicate.clone(),
            },
            Plan::Project { input, exprs } => Plan::Project {
                input: b(input)?,
                exprs: exprs.clone(),
            },
            Plan::ReplaceSink { input, table } => Plan::ReplaceSink {
                input: b(input)?,
                table: table.clone(),
            },
            Plan::UpdateSink {
                input,
                table,
                key,
                value,
            } => Plan::UpdateSink {
                input: b(input)?,
                table: table.clone(),
                key: key.clone(),
                value: value.clone(),
            },
            Plan::GroupByAgg(a) => Plan::GroupByAgg(AggNode {
                input: b(&a.input)?,
                ..a.clone()
            }),
            Plan::Join(j) => Plan::Join(JoinNode {
                left: b(&j.left)?,
                right: b(&j.right)?,
                ..j.clone()
            }),
            Plan::VertexCompute(v) => Plan::VertexCompute(VertexComputeNode {
                input: b(&v.input)?,
                emit_messages: match &v.emit_messages {
                    Some(m) => Some(b(m)?),
                    None => None,
                },
                ..v.clone()
            }),
            Plan::Union(inputs) => Plan::Union(inputs.iter().map(|p| f(p)).collect::<Result<_>>()?),
        })
    }

    pub fn count_joins(&self) -> usize {
        let own = matches!(self, Plan::Join(_)) as usize;
        own + self
            .children()
            .iter()
            .map(|c| c.count_joins())
            .sum::<usize>()
    }

    pub fn scans(&self) -> Vec<&ScanNode> {
        let mut out = Vec::new();
        self.collect_scans(&mut out);
        out
    }

    fn collect_scans<'a>(&'a self, out: &mut Vec<&'a ScanNode>) {
        if let Plan::Scan(s) = self {
            out.push(s);
        }
        for c in self.children() {
            c.collect_scans(out);
        }
    }

    pub fn contains_vertex_compute(&self) -> bool {
        matches!(self, Plan::VertexCompute(_))
            || self.children().iter().any(|c| c.contains_vertex_compute())
    }

    /// Canonical form for structural comparison. Inner joins whose method is
    /// not yet chosen are commutative, so their children are ordered by
    /// printed form; expressions are canonicalized likewise.
    pub fn canonical(&self) -> Plan {
        let mut canon = |p: &Plan| Ok(p.canonical());
        let p = self
            .map_children(&mut canon)
            .expect("canonical is infallible");
        match p {
            Plan::Join(mut j) => {
                if j.kind == JoinKind::Inner
                    && j.method == JoinMethod::Unchosen
                    && j.left.to_string() > j.right.to_string()
                {
                    std::mem::swap(&mut j.left, &mut j.right);
                    for k in &mut j.on {
                        std::mem::swap(&mut k.0, &mut k.1);
                    }
                }
                j.on.sort();
                Plan::Join(j)
            }
            Plan::Filter { input, predicate } => Plan::Filter {
                input,
                predicate: predicate.canonical(),
            },
            Plan::Project { input, exprs } => Plan::Project {
                input,
                exprs: exprs.into_iter().map(|(e, n)| (e.canonical(), n)).collect(),
            },
            Plan::GroupByAgg(mut a) => {
                a.having = a.having.map(|h| h.canonical());
                for agg in &mut a.aggs {
                    agg.arg = agg.arg.as_ref().map(Expr::canonical);
                }
                Plan::GroupByAgg(a)
            }
            Plan::Scan(mut s) => {
                s.predicate = s.predicate.map(|e| e.canonical());
                Plan::Scan(s)
            }
            other => other,
        }
    }

    /// Structural equality modulo commutative operand order.
    pub fn structurally_eq(&self, other: &Plan) -> bool {
        self.canonical() == other.canonical()
    }

    /// Output schema; every unresolved reference anywhere in the tree is
    /// reported in one `Validation` error.
    pub fn schema(&self, catalog: &Catalog, params: &Params) -> Result<Schema> {
        let mut errors = Vec::new();
        match self.infer(catalog, params, &mut errors) {
            Some(s) if errors.is_empty() => Ok(s),
            _ => Err(Error::Validation(errors)),
        }
    }

    pub(crate) fn infer(
        &self,
        catalog: &Catalog,
        params: &Params,
        errors: &mut Vec<String>,
    ) -> Option<Schema> {
        match self {
            Plan::Scan(s) => {
                let Some(entry) = catalog.get(&s.table) else {
                    errors.push(format!("unknown table {}", s.table));
                    return None;
                };
                if let Some(p) = &s.projection {
                    if entry.projection(p).is_none() {
                        errors.push(format!("unknown projection {p} on {}", s.table));
                    }
                }
                let schema = Schema::qualified(&entry.table, &s.alias);
                if let Some(pred) = &s.predicate {
                    check_predicate(pred, &schema, params, errors);
                }
                for c in &s.sip {
                    if schema.index_of(c).is_none() {
                        errors.push(format!("SIP column {c} not in scan {}", s.alias));
                    }
                }
                Some(schema)
            }
            Plan::Filter { input, predicate } => {
                let schema = input.infer(catalog, params, errors)?;
                check_predicate(predicate, &schema, params, errors);
                Some(schema)
            }
            Plan::Project { input, exprs } => {
                let schema = input.infer(catalog, params, errors)?;
                let fields: Vec<_> = exprs
                    .iter()
                    .map(|(e, n)| e.check(&schema, params, errors).map(|t| (n.clone(), t)))
                    .collect();
                fields
                    .into_iter()
                    .collect::<Option<Vec<_>>>()
                    .map(Schema::new)
            }
            Plan::Join(j) => {
                let l = j.left.infer(catalog, params, errors);
                let r = j.right.infer(catalog, params, errors);
                let (l, r) = (l?, r?);
                for (lk, rk) in &j.on {
                    let lt = resolve_type(&l, lk, errors);
                    let rt = resolve_type(&r, rk, errors);
                    if let (Some(lt), Some(rt)) = (lt, rt) {
                        if lt != rt {
                            errors.push(format!(
                                "join key type mismatch: {lk} is {lt}, {rk} is {rt}"
                            ));
                        }
                    }
                }
                if j.on.is_empty() {
                    errors.push("join without keys".into());
                }
                Some(l.concat(&r))
            }
            Plan::GroupByAgg(a) => {
                let input = a.input.infer(catalog, params, errors)?;
                let mut fields = Vec::new();
                for k in &a.keys {
                    match input.index_of(k) {
                        Some(i) => fields.push((input.field(i).name.clone(), input.field(i).ty)),
                        None => errors.push(format!("unresolved group key {k} in {input}")),
                    }
                }
                for agg in &a.aggs {
                    let arg_ty = agg.arg.as_ref().map(|e| e.check(&input, params, errors));
                    let ty = match (agg.func, arg_ty) {
                        (AggFunc::Count | AggFunc::CountNull, _) => Some(LogicalType::Int64),
                        (_, None) => {
                            errors.push(format!("aggregate {} needs an argument", agg.name));
                            None
                        }
                        (AggFunc::Sum, Some(Some(t))) if !t.is_numeric() => {
                            errors.push(format!("SUM over {t} in {}", agg.name));
                            None
                        }
                        (_, Some(t)) => t,
                    };
                    if let Some(t) = ty {
                        fields.push((agg.name.clone(), t));
                    }
                }
                let out = Schema::new(fields);
                if let Some(h) = &a.having {
                    check_predicate(h, &out, params, errors);
                }
                Some(out)
            }
            Plan::VertexCompute(v) => {
                let input = v.input.infer(catalog, params, errors)?;
                resolve_type(&input, &v.vertex_id, errors);
                resolve_type(&input, &v.vertex_value, errors);
                v.message.check(&input, params, errors);
                if let Some(m) = &v.emit_messages {
                    m.infer(catalog, params, errors);
                }
                Some(vertex_compute_schema(v, &input))
            }
            Plan::Union(inputs) => {
                let schemas: Vec<Option<Schema>> = inputs
                    .iter()
                    .map(|p| p.infer(catalog, params, errors))
                    .collect();
                let first = schemas.first().cloned().flatten();
                if inputs.is_empty() {
                    errors.push("union without inputs".into());
                }
                if let Some(f) = &first {
                    for s in schemas.iter().skip(1).flatten() {
                        let a: Vec<_> = f.fields.iter().map(|x| x.ty).collect();
                        let b: Vec<_> = s.fields.iter().map(|x| x.ty).collect();
                        if a != b {
                            errors.push(format!("union inputs disagree: {f} vs {s}"));
                        }
                    }
                }
                first
            }
            Plan::ReplaceSink { input, .. } => input.infer(catalog, params, errors),
            Plan::UpdateSink {
                input, key, value, ..
            } => {
                let s = input.infer(catalog, params, errors)?;
                resolve_type(&s, key, errors);
                resolve_type(&s, value, errors);
                Some(s)
            }
        }
    }
}

/// V′ keeps the receiving vertex's columns (prefix stripped) with the value
/// column replaced by the compute result.
pub(crate) fn vertex_compute_schema(v: &VertexComputeNode, input: &Schema) -> Schema {
    let prefix = v
        .vertex_id
        .rsplit_once('.')
        .map(|(p, _)| format!("{p}."))
        .unwrap_or_default();
    let value_name = input
        .index_of(&v.vertex_value)
        .map(|i| input.field(i).name.clone())
        .unwrap_or_default();
    Schema::new(
        input
            .fields
            .iter()
            .filter(|f| f.name.starts_with(&prefix))
            .map(|f| {
                let ty = if f.name == value_name && v.kind == VertexComputeKind::PageRank {
                    LogicalType::Float64
                } else {
                    f.ty
                };
                (f.name[prefix.len()..].to_string(), ty)
            }),
    )
}

fn resolve_type(schema: &Schema, name: &str, errors: &mut Vec<String>) -> Option<LogicalType> {
    match schema.index_of(name) {
        Some(i) => Some(schema.field(i).ty),
        None => {
            errors.push(format!("unresolved column {name} in {schema}"));
            None
        }
    }
}

fn check_predicate(e: &Expr, schema: &Schema, params: &Params, errors: &mut Vec<String>) {
    if let Some(t) = e.check(schema, params, errors) {
        if t != LogicalType::Boolean {
            errors.push(format!("predicate {e} is {t}, expected boolean"));
        }
    }
}

fn join_label(j: &JoinNode) -> &'static str {
    match (j.kind, j.method) {
        (JoinKind::LeftOuter, _) => "LeftOuterJoin",
        (_, JoinMethod::Hash { .. }) => "HashJoin",
        (_, JoinMethod::Merge) => "MergeJoin",
        (_, JoinMethod::Unchosen) => "Join",
    }
}

impl Plan {
    fn fmt_line(&self) -> String {
        match self {
            Plan::Scan(s) => {
                let mut line = format!("Scan {} AS {}", s.table, s.alias);
                if let Some(p) = &s.projection {
                    line += &format!(" via {p}");
                }
                if let Some(p) = &s.predicate {
                    line += &format!(" where {p}");
                }
                if !s.sip.is_empty() {
                    line += &format!(" sip=[{}]", s.sip.join(", "));
                }
                line
            }
            Plan::Filter { predicate, .. } => format!("Filter {predicate}"),
            Plan::Project { exprs, .. } => {
                let parts: Vec<String> = exprs.iter().map(|(e, n)| format!("{e} AS {n}")).collect();
                format!("Project [{}]", parts.join(", "))
            }
            Plan::Join(j) => {
                let keys: Vec<String> = j.on.iter().map(|(l, r)| format!("{l} = {r}")).collect();
                let mut tags = Vec::new();
                match j.method {
                    JoinMethod::Hash {
                        build: BuildSide::Left,
                    } => tags.push("build=left"),
                    JoinMethod::Hash {
                        build: BuildSide::Right,
                    } => tags.push("build=right"),
                    JoinMethod::Merge if j.kind == JoinKind::LeftOuter => tags.push("merge"),
                    _ => {}
                }
                if j.sip {
                    tags.push("sip");
                }
                let tags = if tags.is_empty() {
                    String::new()
                } else {
                    format!("[{}]", tags.join(", "))
                };
                format!("{}{tags} {}", join_label(j), keys.join(" AND "))
            }
            Plan::GroupByAgg(a) => {
                let aggs: Vec<String> = a
                    .aggs
                    .iter()
                    .map(|g| {
                        let arg = g.arg.as_ref().map_or("*".to_string(), ToString::to_string);
                        let f = match g.func {
                            AggFunc::Min => "MIN",
                            AggFunc::Max => "MAX",
                            AggFunc::Sum => "SUM",
                            AggFunc::Count => "COUNT",
                            AggFunc::CountNull => "COUNT_NULL",
                        };
                        format!("{f}({arg}) AS {}", g.name)
                    })
                    .collect();
                let mut line = format!(
                    "GroupByAgg keys=[{}] aggs=[{}]",
                    a.keys.join(", "),
                    aggs.join(", ")
                );
                if let Some(h) = &a.having {
                    line += &format!(" having {h}");
                }
                line
            }
            Plan::VertexCompute(v) => format!(
                "VertexCompute {} vertex=({}, {}) message={}{}",
                v.kind.name(),
                v.vertex_id,
                v.vertex_value,
                v.message,
                if v.emit_messages.is_some() {
                    " emits M'"
                } else {
                    ""
                }
            ),
            Plan::Union(_) => "Union".to_string(),
            Plan::ReplaceSink { table, .. } => format!("ReplaceSink {table}"),
            Plan::UpdateSink {
                table, key, value, ..
            } => format!("UpdateSink {table} key={key} value={value}"),
        }
    }

    fn fmt_tree(&self, depth: usize, out: &mut String) {
        out.push_str(&"  ".repeat(depth));
        out.push_str(&self.fmt_line());
        out.push('\n');
        for c in self.children() {
            c.fmt_tree(depth + 1, out);
        }
    }
}

/// One operator per line, children indented two spaces.
impl fmt::Display for Plan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        self.fmt_tree(0, &mut out);
        f.write_str(&out)
    }
}
