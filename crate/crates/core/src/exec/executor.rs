// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

use std::collections::VecDeque;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Duration;
use web_time::Instant;

use serde::Serialize;

use super::agg::{AggSpec, HashAggOp, StreamingAggOp};
use super::batch::{Batch, RowTracker, Schema, DEFAULT_BATCH_SIZE};
use super::keys::{Keys, SipFilter};
use super::ops::{
    BoxOp, FilterOp, HashJoinOp, HashTable, Instrumented, MergeJoinOp, OpStats, ProjectOp,
    ReplayOp, ScanOp, ScanSpec, UnionOp,
};
use super::vertex_udf;
use crate::error::{Error, Result};
use crate::expr::{Expr, Params};
use crate::plan::{BuildSide, JoinKind, JoinMethod, JoinNode, Plan};
use crate::storage::{build_projection, partition_assignment, Catalog, ColumnTable, Projection};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AggMode {
    /// Streaming when the input is sorted on a group key, hash otherwise.
    Auto,
    Hash,
}

#[derive(Debug, Clone)]
pub struct ExecOptions {
    pub batch_size: usize,
    pub sip: bool,
    pub agg_mode: AggMode,
    /// Record the peak number of rows held by in-flight batches.
    pub track_rows: bool,
}

impl Default for ExecOptions {
    fn default() -> Self {
        ExecOptions {
            batch_size: DEFAULT_BATCH_SIZE,
            sip: true,
            agg_mode: AggMode::Auto,
            track_rows: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OperatorReport {
    pub name: String,
    pub rows: u64,
    /// Inclusive of the operator's inputs, summed over partitions.
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ExecReport {
    pub rows: usize,
    pub wall: Duration,
    /// Bytes of column data read by scans.
    pub bytes_read: u64,
    pub bytes_written: u64,
    pub sip_pruned_rows: u64,
    pub peak_live_rows: usize,
    pub exchanges: usize,
    pub streaming_aggs: usize,
    pub hash_aggs: usize,
    pub operators: Vec<OperatorReport>,
}

#[derive(Debug, Clone)]
pub struct ExecResult {
    pub table: ColumnTable,
    /// Extra outputs such as the message table M′ of a vertex-compute node.
    pub side_tables: Vec<(String, ColumnTable)>,
    pub report: ExecReport,
}

/// Validates, compiles and runs `plan` over `catalog` with one worker per
/// catalog partition. Only the sink output is materialized.
pub fn execute(
    plan: &Plan,
    catalog: &Catalog,
    params: &Params,
    opts: &ExecOptions,
) -> Result<ExecResult> {
    let start = Instant::now();
    plan.schema(catalog, params)?;
    let mut c = Compiler {
        catalog,
        params: Arc::new(params.clone()),
        opts,
        partitions: catalog.partitions(),
        stats: Vec::new(),
        bytes_read: Arc::new(AtomicU64::new(0)),
        sip_pruned: Arc::new(AtomicU64::new(0)),
        tracker: opts.track_rows.then(|| Arc::new(RowTracker::default())),
        side_tables: Vec::new(),
        report: ExecReport::default(),
    };
    let root = c.compile(plan, &[])?;
    let parts = c.run(&root)?;
    let batches: Vec<Batch> = parts.into_iter().flatten().collect();
    let table = Batch::concat(root.schema.clone(), &batches)?.into_table(sink_name(plan))?;
    let mut report = c.report;
    report.rows = table.row_count();
    report.wall = start.elapsed();
    report.bytes_read = c.bytes_read.load(Ordering::Relaxed);
    report.sip_pruned_rows = c.sip_pruned.load(Ordering::Relaxed);
    report.peak_live_rows = c.tracker.as_ref().map_or(0, |t| t.peak());
    report.operators = c
        .stats
        .iter()
        .map(|s| OperatorReport {
            name: s.name.clone(),
            rows: s.rows.load(Ordering::Relaxed),
            elapsed: Duration::from_nanos(s.nanos.load(Ordering::Relaxed)),
        })
        .collect();
    Ok(ExecResult {
        table,
        side_tables: c.side_tables,
        report,
    })
}

fn sink_name(plan: &Plan) -> &str {
    match plan {
        Plan::ReplaceSink { table, .. } | Plan::UpdateSink { table, .. } => table,
        _ => "result",
    }
}

/// Physical properties of a partitioned stream. Each list holds the names
/// of columns known to carry equal values.
#[derive(Debug, Clone, Default)]
struct Props {
    /// Rows sit in partition `hash(col) mod P`.
    part: Vec<String>,
    /// Rows within a partition are ordered by this column.
    sort: Vec<String>,
}

enum Phys {
    Scan(Arc<ScanSpec>),
    Replay(Arc<Vec<Vec<Batch>>>),
    Filter(Box<PhysNode>, Expr),
    Project(Box<PhysNode>, Vec<Expr>),
    HashJoin {
        probe: Box<PhysNode>,
        table: Arc<HashTable>,
        kind: JoinKind,
        probe_is_left: bool,
        probe_keys: Vec<usize>,
    },
    MergeJoin {
        left: Box<PhysNode>,
        right: Box<PhysNode>,
        left_keys: Vec<usize>,
        right_keys: Vec<usize>,
        kind: JoinKind,
    },
    Agg {
        input: Box<PhysNode>,
        spec: Arc<AggSpec>,
        lead: Option<usize>,
    },
    Union(Vec<PhysNode>),
}

struct PhysNode {
    op: Phys,
    schema: Arc<Schema>,
    props: Props,
    stats: Arc<OpStats>,
}

type SipBinding = (String, Arc<SipFilter>);

struct Compiler<'a> {
    catalog: &'a Catalog,
    params: Arc<Params>,
    opts: &'a ExecOptions,
    partitions: usize,
    stats: Vec<Arc<OpStats>>,
    bytes_read: Arc<AtomicU64>,
    sip_pruned: Arc<AtomicU64>,
    tracker: Option<Arc<RowTracker>>,
    side_tables: Vec<(String, ColumnTable)>,
    report: ExecReport,
}

/// Keeps only bindings whose column is a field of `schema`.
fn sips_for(sips: &[SipBinding], schema: &Schema) -> Vec<SipBinding> {
    sips.iter()
        .filter(|(c, _)| schema.fields.iter().any(|f| &f.name == c))
        .cloned()
        .collect()
}

fn contains(list: &[String], name: &str) -> bool {
    list.iter().any(|n| n == name)
}

impl<'a> Compiler<'a> {
    fn node(&mut self, name: String, op: Phys, schema: Arc<Schema>, props: Props) -> PhysNode {
        let stats = OpStats::new(name);
        self.stats.push(stats.clone());
        PhysNode {
            op,
            schema,
            props,
            stats,
        }
    }

    fn schema_of(&self, plan: &Plan) -> Result<Schema> {
        plan.schema(self.catalog, &self.params)
    }

    fn compile(&mut self, plan: &Plan, sips: &[SipBinding]) -> Result<PhysNode> {
        match plan {
            Plan::Scan(s) => {
                let entry = self.catalog.entry(&s.table)?;
                let projection: Arc<Projection> = match &s.projection {
                    Some(name) => entry
                        .projection(name)
                        .cloned()
                        .ok_or_else(|| Error::schema(format!("unknown projection {name}")))?,
                    None => match entry.projections.first() {
                        Some(p) => p.clone(),
                        None => {
                            let first = entry
                                .table
                                .columns()
                                .first()
                                .map(|c| c.name.clone())
                                .ok_or_else(|| {
                                    Error::schema(format!("table {} has no columns", s.table))
                                })?;
                            Arc::new(build_projection(
                                format!("{}_by_{first}", s.table),
                                &entry.table,
                                &[&first],
                                &first,
                                self.partitions,
                            )?)
                        }
                    },
                };
                let schema = Arc::new(Schema::qualified(&projection.table, &s.alias));
                let bound: Vec<(usize, Arc<SipFilter>)> = sips_for(sips, &schema)
                    .into_iter()
                    .map(|(c, f)| (schema.index_of(&c).unwrap(), f))
                    .collect();
                let overlay = match &entry.overlay {
                    Some(o) => Some((
                        projection
                            .table
                            .column_index(&o.key_column)
                            .ok_or_else(|| {
                                Error::schema(format!(
                                    "overlay key {} not in {}",
                                    o.key_column, s.table
                                ))
                            })?,
                        projection
                            .table
                            .column_index(&o.value_column)
                            .ok_or_else(|| {
                                Error::schema(format!(
                                    "overlay value {} not in {}",
                                    o.value_column, s.table
                                ))
                            })?,
                        o.clone(),
                    )),
                    None => None,
                };
                let props = Props {
                    part: vec![format!("{}.{}", s.alias, projection.segmentation_key)],
                    sort: projection
                        .sort_key
                        .first()
                        .map(|k| vec![format!("{}.{k}", s.alias)])
                        .unwrap_or_default(),
                };
                let name = format!(
                    "Scan {} AS {} via {}{}",
                    s.table,
                    s.alias,
                    projection.name,
                    if bound.is_empty() { "" } else { " +sip" }
                );
                let spec = Arc::new(ScanSpec {
                    projection,
                    schema: schema.clone(),
                    predicate: s.predicate.clone(),
                    sips: bound,
                    overlay,
                    params: self.params.clone(),
                    batch_size: self.opts.batch_size,
                    bytes_read: self.bytes_read.clone(),
                    sip_pruned: self.sip_pruned.clone(),
                    tracker: self.tracker.clone(),
                });
                Ok(self.node(name, Phys::Scan(spec), schema, props))
            }
            Plan::Filter { input, predicate } => {
                let child = self.compile(input, sips)?;
                let (schema, props) = (child.schema.clone(), child.props.clone());
                Ok(self.node(
                    format!("Filter {predicate}"),
                    Phys::Filter(Box::new(child), predicate.clone()),
                    schema,
                    props,
                ))
            }
            Plan::Project { input, exprs } => {
                let out_schema = Arc::new(self.schema_of(plan)?);
                let in_schema = self.schema_of(input)?;
                let rename = |name: &str| -> Option<String> {
                    exprs
                        .iter()
                        .find(|(_, n)| n == name)
                        .and_then(|(e, _)| match e {
                            Expr::Column(c) => in_schema
                                .index_of(c)
                                .map(|i| in_schema.field(i).name.clone()),
                            _ => None,
                        })
                };
                let child_sips: Vec<SipBinding> = sips
                    .iter()
                    .filter_map(|(c, f)| rename(c).map(|src| (src, f.clone())))
                    .collect();
                let child = self.compile(input, &child_sips)?;
                let map_names = |names: &[String]| -> Vec<String> {
                    exprs
                        .iter()
                        .filter(|(e, _)| match e {
                            Expr::Column(c) => in_schema
                                .index_of(c)
                                .is_some_and(|i| contains(names, &in_schema.field(i).name)),
                            _ => false,
                        })
                        .map(|(_, n)| n.clone())
                        .collect()
                };
                let props = Props {
                    part: map_names(&child.props.part),
                    sort: map_names(&child.props.sort),
                };
                let label: Vec<String> = exprs.iter().map(|(e, n)| format!("{e} AS {n}")).collect();
                Ok(self.node(
                    format!("Project [{}]", label.join(", ")),
                    Phys::Project(
                        Box::new(child),
                        exprs.iter().map(|(e, _)| e.clone()).collect(),
                    ),
                    out_schema,
                    props,
                ))
            }
            Plan::Join(j) => self.compile_join(j, sips),
            Plan::GroupByAgg(a) => {
                let out_schema = Arc::new(self.schema_of(plan)?);
                let in_schema = self.schema_of(&a.input)?;
                let key_names: Vec<String> = a
                    .keys
                    .iter()
                    .map(|k| {
                        in_schema
                            .resolve(k)
                            .map(|i| in_schema.field(i).name.clone())
                    })
                    .collect::<Result<_>>()?;
                let child_sips: Vec<SipBinding> = sips
                    .iter()
                    .filter(|(c, _)| contains(&key_names, c))
                    .cloned()
                    .collect();
                let mut child = self.compile(&a.input, &child_sips)?;
                if self.partitions > 1 && !key_names.iter().any(|k| contains(&child.props.part, k))
                {
                    child = self.exchange(child, key_names.first().cloned())?;
                }
                let keys: Vec<usize> = key_names
                    .iter()
                    .map(|k| child.schema.index_of(k).unwrap())
                    .collect();
                let lead = match self.opts.agg_mode {
                    AggMode::Auto => key_names
                        .iter()
                        .position(|k| contains(&child.props.sort, k)),
                    AggMode::Hash => None,
                };
                if lead.is_some() {
                    self.report.streaming_aggs += 1;
                } else {
                    self.report.hash_aggs += 1;
                }
                let props = Props {
                    part: key_names
                        .iter()
                        .filter(|k| contains(&child.props.part, k))
                        .cloned()
                        .collect(),
                    sort: lead.map(|l| vec![key_names[l].clone()]).unwrap_or_default(),
                };
                let spec = Arc::new(AggSpec {
                    keys,
                    aggs: a.aggs.clone(),
                    having: a.having.clone(),
                    schema: out_schema.clone(),
                    params: self.params.clone(),
                    batch_size: self.opts.batch_size,
                    tracker: self.tracker.clone(),
                });
                let name = format!(
                    "GroupByAgg[{}] keys=[{}]",
                    if lead.is_some() { "streaming" } else { "hash" },
                    key_names.join(", ")
                );
                Ok(self.node(
                    name,
                    Phys::Agg {
                        input: Box::new(child),
                        spec,
                        lead,
                    },
                    out_schema,
                    props,
                ))
            }
            Plan::VertexCompute(v) => {
                let input = self.compile(&v.input, &[])?;
                let rows = self.materialize(&input)?;
                let out = vertex_udf::compute(v, &rows, &self.params)?;
                if let Some(edges) = &v.emit_messages {
                    let messages =
                        vertex_udf::emit_messages(v, &out, edges, self.catalog, &self.params)?;
                    self.side_tables.push(("M'".to_string(), messages));
                }
                let schema = Arc::new(Schema::of_table(&out));
                let replay = self.node(
                    format!("VertexCompute {}", v.kind.name()),
                    Phys::Replay(Arc::new(vec![vec![Batch::from_table(
                        &out,
                        schema.clone(),
                    )]])),
                    schema.clone(),
                    Props::default(),
                );
                let key = schema.index_of("id").map(|i| schema.field(i).name.clone());
                if self.partitions > 1 {
                    self.exchange(replay, key)
                } else {
                    Ok(PhysNode {
                        props: Props {
                            part: key.into_iter().collect(),
                            sort: vec![],
                        },
                        ..replay
                    })
                }
            }
            Plan::Union(inputs) => {
                let out_schema = Arc::new(self.schema_of(plan)?);
                let mut children = Vec::new();
                for input in inputs {
                    let s = self.schema_of(input)?;
                    let mapped: Vec<SipBinding> = sips
                        .iter()
                        .filter_map(|(c, f)| {
                            out_schema
                                .fields
                                .iter()
                                .position(|fl| &fl.name == c)
                                .map(|i| (s.field(i).name.clone(), f.clone()))
                        })
                        .collect();
                    children.push(self.compile(input, &mapped)?);
                }
                Ok(self.node(
                    "Union".into(),
                    Phys::Union(children),
                    out_schema,
                    Props::default(),
                ))
            }
            Plan::ReplaceSink { input, .. } | Plan::UpdateSink { input, .. } => {
                self.compile(input, sips)
            }
        }
    }

    fn compile_join(&mut self, j: &JoinNode, sips: &[SipBinding]) -> Result<PhysNode> {
        let ls = self.schema_of(&j.left)?;
        let rs = self.schema_of(&j.right)?;
        let schema = Arc::new(ls.concat(&rs));
        let lkeys: Vec<usize> =
            j.on.iter()
                .map(|(l, _)| ls.resolve(l))
                .collect::<Result<_>>()?;
        let rkeys: Vec<usize> =
            j.on.iter()
                .map(|(_, r)| rs.resolve(r))
                .collect::<Result<_>>()?;
        let lnames: Vec<String> = lkeys.iter().map(|&i| ls.field(i).name.clone()).collect();
        let rnames: Vec<String> = rkeys.iter().map(|&i| rs.field(i).name.clone()).collect();
        let inner = j.kind == JoinKind::Inner;
        let keys_label: Vec<String> = lnames
            .iter()
            .zip(&rnames)
            .map(|(l, r)| format!("{l} = {r}"))
            .collect();

        let method = match j.method {
            JoinMethod::Unchosen => JoinMethod::Hash {
                build: BuildSide::Right,
            },
            m => m,
        };
        match method {
            JoinMethod::Merge => {
                let left = self.compile(&j.left, &sips_for(sips, &ls))?;
                let right_sips = if inner {
                    sips_for(sips, &rs)
                } else {
                    Vec::new()
                };
                let right = self.compile(&j.right, &right_sips)?;
                if self.partitions > 1 {
                    let co = lnames.iter().zip(&rnames).any(|(l, r)| {
                        contains(&left.props.part, l) && contains(&right.props.part, r)
                    });
                    if !co {
                        return Err(Error::plan(format!(
                            "merge join on {} needs inputs co-partitioned on the key",
                            keys_label.join(", ")
                        )));
                    }
                }
                let mut props = left.props.clone();
                if inner {
                    for (l, r) in lnames.iter().zip(&rnames) {
                        if contains(&props.part, l) {
                            props.part.push(r.clone());
                        }
                        if contains(&props.sort, l) {
                            props.sort.push(r.clone());
                        }
                    }
                    props.part.extend(right.props.part.iter().cloned());
                }
                let name = format!(
                    "{} {}",
                    if inner {
                        "MergeJoin"
                    } else {
                        "LeftOuterJoin[merge]"
                    },
                    keys_label.join(" AND ")
                );
                Ok(self.node(
                    name,
                    Phys::MergeJoin {
                        left: Box::new(left),
                        right: Box::new(right),
                        left_keys: lkeys,
                        right_keys: rkeys,
                        kind: j.kind,
                    },
                    schema,
                    props,
                ))
            }
            JoinMethod::Hash { build } => {
                if !inner && build == BuildSide::Left {
                    return Err(Error::plan(
                        "left outer hash join must build the right side",
                    ));
                }
                let (
                    build_plan,
                    build_schema,
                    build_keys,
                    probe_plan,
                    probe_schema,
                    probe_keys,
                    probe_names,
                    build_names,
                ) = match build {
                    BuildSide::Right => (
                        &j.right, &rs, &rkeys, &j.left, &ls, &lkeys, &lnames, &rnames,
                    ),
                    BuildSide::Left => (
                        &j.left, &ls, &lkeys, &j.right, &rs, &rkeys, &rnames, &lnames,
                    ),
                };
                let build_sips = if inner {
                    sips_for(sips, build_schema)
                } else {
                    Vec::new()
                };
                let build_node = self.compile(build_plan, &build_sips)?;
                let built = self.materialize(&build_node)?;
                let table = Arc::new(HashTable::new(built, build_keys));
                let mut probe_sips = sips_for(sips, probe_schema);
                if self.opts.sip && j.sip && inner {
                    let keys = Keys::extract(&table.batch, &build_keys[..1]);
                    probe_sips.push((
                        probe_names[0].clone(),
                        Arc::new(SipFilter::from_keys(&keys)),
                    ));
                }
                let probe = self.compile(probe_plan, &probe_sips)?;
                let mut props = probe.props.clone();
                if inner {
                    for (p, b) in probe_names.iter().zip(build_names) {
                        if contains(&props.part, p) {
                            props.part.push(b.clone());
                        }
                        if contains(&props.sort, p) {
                            props.sort.push(b.clone());
                        }
                    }
                }
                let name = format!(
                    "{}[build={}{}] {}",
                    if inner { "HashJoin" } else { "LeftOuterJoin" },
                    if build == BuildSide::Left {
                        "left"
                    } else {
                        "right"
                    },
                    if self.opts.sip && j.sip && inner {
                        ", sip"
                    } else {
                        ""
                    },
                    keys_label.join(" AND ")
                );
                Ok(self.node(
                    name,
                    Phys::HashJoin {
                        probe: Box::new(probe),
                        table,
                        kind: j.kind,
                        probe_is_left: build == BuildSide::Right,
                        probe_keys: probe_keys.clone(),
                    },
                    schema,
                    props,
                ))
            }
            JoinMethod::Unchosen => unreachable!(),
        }
    }

    /// Runs `node` to completion and concatenates every partition's output.
    fn materialize(&mut self, node: &PhysNode) -> Result<Batch> {
        let parts = self.run(node)?;
        let all: Vec<Batch> = parts.into_iter().flatten().collect();
        Batch::concat(node.schema.clone(), &all)
    }

    /// Re-partitions `node`'s output by hash of `key` (everything to
    /// partition 0 when `key` is `None`).
    fn exchange(&mut self, node: PhysNode, key: Option<String>) -> Result<PhysNode> {
        self.report.exchanges += 1;
        let p = self.partitions;
        let parts = self.run(&node)?;
        let key_idx = key.as_ref().map(|k| node.schema.index_of(k).unwrap());
        let mut out: Vec<Vec<Batch>> = vec![Vec::new(); p];
        for b in parts.into_iter().flatten() {
            match key_idx {
                None => out[0].push(b),
                Some(k) => {
                    let assign = partition_assignment(b.column(k), p);
                    let mut rows: Vec<Vec<u32>> = vec![Vec::new(); p];
                    for (i, &a) in assign.iter().enumerate() {
                        rows[a as usize].push(i as u32);
                    }
                    for (dst, idx) in rows.iter().enumerate() {
                        if !idx.is_empty() {
                            out[dst].push(b.take(idx));
                        }
                    }
                }
            }
        }
        let schema = node.schema.clone();
        let props = Props {
            part: key.into_iter().collect(),
            sort: Vec::new(),
        };
        Ok(self.node(
            format!("Exchange {}", props.part.join(", ")),
            Phys::Replay(Arc::new(out)),
            schema,
            props,
        ))
    }

    /// Drains `node` on every partition, in parallel when there are several.
    /// Returned batches are detached from the in-flight row tracker.
    fn run(&self, node: &PhysNode) -> Result<Vec<Vec<Batch>>> {
        let p = self.partitions;
        let drain = |part: usize| -> Result<Vec<Batch>> {
            let mut op = instantiate(node, part);
            let mut out = Vec::new();
            while let Some(b) = op.next()? {
                out.push(b.detached());
            }
            Ok(out)
        };
        if p == 1 {
            return Ok(vec![drain(0)?]);
        }
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..p).map(|part| s.spawn(move || drain(part))).collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker panicked"))
                .collect()
        })
    }
}

fn instantiate(node: &PhysNode, part: usize) -> BoxOp {
    let inner: BoxOp = match &node.op {
        Phys::Scan(spec) => Box::new(ScanOp::new(spec.clone(), part)),
        Phys::Replay(parts) => Box::new(ReplayOp {
            batches: parts.get(part).cloned().unwrap_or_default().into(),
        }),
        Phys::Filter(child, predicate) => {
            let (params, tracker) = scan_context(node);
            Box::new(FilterOp {
                input: instantiate(child, part),
                predicate: predicate.clone(),
                params,
                tracker,
            })
        }
        Phys::Project(child, exprs) => {
            let (params, tracker) = scan_context(node);
            Box::new(ProjectOp {
                input: instantiate(child, part),
                exprs: exprs.clone(),
                schema: node.schema.clone(),
                params,
                tracker,
            })
        }
        Phys::HashJoin {
            probe,
            table,
            kind,
            probe_is_left,
            probe_keys,
        } => {
            let (_, tracker) = scan_context(node);
            Box::new(HashJoinOp {
                probe: instantiate(probe, part),
                table: table.clone(),
                kind: *kind,
                probe_is_left: *probe_is_left,
                probe_keys: probe_keys.clone(),
                schema: node.schema.clone(),
                batch_size: batch_size(node),
                tracker,
                current: None,
            })
        }
        Phys::MergeJoin {
            left,
            right,
            left_keys,
            right_keys,
            kind,
        } => {
            let (_, tracker) = scan_context(node);
            Box::new(MergeJoinOp::new(
                instantiate(left, part),
                instantiate(right, part),
                left_keys.clone(),
                right_keys.clone(),
                *kind,
                node.schema.clone(),
                batch_size(node),
                tracker,
            ))
        }
        Phys::Agg { input, spec, lead } => {
            if spec.keys.is_empty() && part > 0 {
                // A global aggregate runs on partition 0 only.
                return Box::new(ReplayOp {
                    batches: VecDeque::new(),
                });
            }
            let child = instantiate(input, part);
            match lead {
                Some(l) => Box::new(
                    StreamingAggOp::new(child, spec.clone(), *l).expect("validated aggregate"),
                ),
                None => Box::new(HashAggOp::new(child, spec.clone())),
            }
        }
        Phys::Union(children) => Box::new(UnionOp {
            inputs: children
                .iter()
                .map(|c| instantiate(c, part))
                .collect::<VecDeque<_>>(),
            schema: node.schema.clone(),
        }),
    };
    Box::new(Instrumented {
        inner,
        stats: node.stats.clone(),
    })
}

/// Finds the shared execution context (params, tracker) by descending to
/// the first scan or aggregate below `node`.
fn scan_context(node: &PhysNode) -> (Arc<Params>, Option<Arc<RowTracker>>) {
    match &node.op {
        Phys::Scan(s) => (s.params.clone(), s.tracker.clone()),
        Phys::Agg { spec, .. } => (spec.params.clone(), spec.tracker.clone()),
        Phys::Filter(c, _) | Phys::Project(c, _) => scan_context(c),
        Phys::HashJoin { probe, .. } => scan_context(probe),
        Phys::MergeJoin { left, .. } => scan_context(left),
        Phys::Union(cs) => cs
            .first()
            .map_or((Arc::new(Params::default()), None), scan_context),
        Phys::Replay(_) => (Arc::new(Params::default()), None),
    }
}

fn batch_size(node: &PhysNode) -> usize {
    match &node.op {
        Phys::Scan(s) => s.batch_size,
        Phys::Agg { spec, .. } => spec.batch_size,
        Phys::Filter(c, _) | Phys::Project(c, _) => batch_size(c),
        Phys::HashJoin { probe, .. } => batch_size(probe),
        Phys::MergeJoin { left, .. } => batch_size(left),
        Phys::Union(cs) => cs.first().map_or(DEFAULT_BATCH_SIZE, batch_size),
        Phys::Replay(_) => DEFAULT_BATCH_SIZE,
    }
}
