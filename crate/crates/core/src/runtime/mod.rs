// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

//! Vertex-centric programs and the engines that run them: a table-UDF
//! engine that materializes every superstep, a shared-memory engine that
//! keeps the graph and messages in memory, and a plain reference
//! interpreter.

mod adjacency;
mod programs;
mod reference;
mod shared;
mod table_udf;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use serde::Serialize;

pub use programs::{CcProgram, PageRankProgram, SsspProgram};
pub use reference::run_reference;
pub use shared::{estimate_shared_bytes, run_shared_memory};
pub use table_udf::run_table_udf;

use crate::error::{Error, Result};
use crate::storage::{Column, ColumnData, ColumnTable, LogicalType, Scalar};

/// A vertex state or message value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Value {
    Int(i64),
    Float(f64),
}

impl Value {
    pub fn as_i64(self) -> i64 {
        match self {
            Value::Int(v) => v,
            Value::Float(v) => v as i64,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Value::Int(v) => v as f64,
            Value::Float(v) => v,
        }
    }

    pub fn to_scalar(self) -> Scalar {
        match self {
            Value::Int(v) => Scalar::Int(v),
            Value::Float(v) => Scalar::Float(v),
        }
    }

    pub fn from_scalar(s: &Scalar) -> Option<Value> {
        match s {
            Scalar::Int(v) => Some(Value::Int(*v)),
            Scalar::Float(v) => Some(Value::Float(*v)),
            _ => None,
        }
    }
}

impl Eq for Value {}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order: integers before floats, floats by `total_cmp`.
impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => a.cmp(b),
            (Value::Float(a), Value::Float(b)) => a.total_cmp(b),
            (Value::Int(_), Value::Float(_)) => Ordering::Less,
            (Value::Float(_), Value::Int(_)) => Ordering::Greater,
        }
    }
}

/// An inbound message and the vertex that sent it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Message {
    pub sender: i64,
    pub value: Value,
}

/// Which edges a program sees as its out-edge list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Neighbors {
    /// Stored edge direction.
    Out,
    /// Out- and in-neighbors merged, as if the graph were undirected.
    Undirected,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Outgoing {
    To(i64, Value),
    AllNeighbors(Value),
}

/// Everything one vertex sees during one superstep.
pub struct Context<'a> {
    superstep: u64,
    id: i64,
    num_vertices: usize,
    /// The vertex state; programs update it in place.
    pub value: Value,
    messages: &'a [Message],
    targets: &'a [i64],
    weights: Option<&'a [f64]>,
    out: &'a mut Vec<Outgoing>,
    halted: bool,
}

impl<'a> Context<'a> {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn new(
        superstep: u64,
        id: i64,
        num_vertices: usize,
        value: Value,
        messages: &'a [Message],
        targets: &'a [i64],
        weights: Option<&'a [f64]>,
        out: &'a mut Vec<Outgoing>,
    ) -> Self {
        Context {
            superstep,
            id,
            num_vertices,
            value,
            messages,
            targets,
            weights,
            out,
            halted: false,
        }
    }

    pub fn superstep(&self) -> u64 {
        self.superstep
    }

    pub fn id(&self) -> i64 {
        self.id
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    /// Inbound messages ordered by sender id, then value.
    pub fn messages(&self) -> &[Message] {
        self.messages
    }

    /// Neighbor ids in ascending order.
    pub fn out_edges(&self) -> &[i64] {
        self.targets
    }

    /// Edge weights aligned with [`Context::out_edges`], when the graph has them.
    pub fn edge_weights(&self) -> Option<&[f64]> {
        self.weights
    }

    pub fn send(&mut self, dst: i64, value: Value) {
        self.out.push(Outgoing::To(dst, value));
    }

    pub fn send_to_neighbors(&mut self, value: Value) {
        if !self.targets.is_empty() {
            self.out.push(Outgoing::AllNeighbors(value));
        }
    }

    pub fn vote_to_halt(&mut self) {
        self.halted = true;
    }

    pub(crate) fn halted(&self) -> bool {
        self.halted
    }
}

/// A vertex-centric program. `compute` must be deterministic given the
/// (sorted) inbound messages.
pub trait VertexProgram: Send + Sync {
    fn name(&self) -> &str;
    fn value_type(&self) -> LogicalType;
    fn neighbors(&self) -> Neighbors {
        Neighbors::Out
    }
    fn initial_state(&self, id: i64, num_vertices: usize) -> Value;
    fn compute(&self, ctx: &mut Context<'_>);
}

#[derive(Debug, Clone)]
pub struct RuntimeOptions {
    /// Table-UDF partitions; 0 uses the graph's partition count.
    pub partitions: usize,
    /// Shared-memory worker threads.
    pub workers: usize,
    /// Shared-memory limit in bytes; `None` uses 75% of available memory.
    pub memory_budget: Option<u64>,
    pub max_supersteps: u64,
    /// Where the table-UDF engine writes each superstep's tables; `None`
    /// keeps the encoded bytes in memory.
    pub spill_dir: Option<PathBuf>,
}

impl Default for RuntimeOptions {
    fn default() -> Self {
        RuntimeOptions {
            partitions: 0,
            workers: crate::storage::default_partitions(),
            memory_budget: None,
            max_supersteps: 10_000,
            spill_dir: None,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SuperstepRecord {
    pub superstep: u64,
    /// Vertices whose compute ran.
    pub active: usize,
    /// Messages sent.
    pub messages: usize,
    pub wall: Duration,
    pub bytes_read: u64,
    pub bytes_written: u64,
}

#[derive(Debug, Clone)]
pub struct RuntimeOutput {
    /// Final `(id, value)` per vertex, ordered by id.
    pub table: ColumnTable,
    pub supersteps: Vec<SuperstepRecord>,
}

impl RuntimeOutput {
    pub fn total_wall(&self) -> Duration {
        self.supersteps.iter().map(|s| s.wall).sum()
    }

    pub fn bytes_written(&self) -> u64 {
        self.supersteps.iter().map(|s| s.bytes_written).sum()
    }
}

pub(crate) fn output_table(
    program: &dyn VertexProgram,
    ids: Vec<i64>,
    values: &[Value],
) -> Result<ColumnTable> {
    let data: ColumnData = match program.value_type() {
        LogicalType::Float64 => values.iter().map(|v| v.as_f64()).collect::<Vec<_>>().into(),
        _ => values.iter().map(|v| v.as_i64()).collect::<Vec<_>>().into(),
    };
    ColumnTable::new(
        program.name(),
        vec![Column::new("id", ids), Column::new("value", data)],
    )
}

pub(crate) fn unknown_vertex(superstep: u64, sender: i64, dst: i64) -> Error {
    Error::Runtime {
        superstep,
        sender,
        message: format!("message to unknown vertex {dst}"),
    }
}

/// Arguments shared by the built-in program constructors.
#[derive(Debug, Clone, Default)]
pub struct ProgramArgs {
    pub source: Option<i64>,
    pub iterations: Option<usize>,
    pub weighted: bool,
}

type Factory = Arc<dyn Fn(&ProgramArgs) -> Result<Arc<dyn VertexProgram>> + Send + Sync>;

/// Programs selectable by name.
#[derive(Clone)]
pub struct ProgramRegistry {
    factories: BTreeMap<String, Factory>,
}

impl Default for ProgramRegistry {
    fn default() -> Self {
        let mut r = ProgramRegistry {
            factories: BTreeMap::new(),
        };
        r.register("sssp", |a: &ProgramArgs| {
            let source = a
                .source
                .ok_or_else(|| Error::Domain("sssp needs a source vertex".into()))?;
            Ok(Arc::new(SsspProgram {
                source,
                weighted: a.weighted,
            }) as Arc<dyn VertexProgram>)
        });
        r.register("pagerank", |a: &ProgramArgs| {
            Ok(Arc::new(PageRankProgram {
                iterations: a.iterations.unwrap_or(10),
            }) as Arc<dyn VertexProgram>)
        });
        r.register("cc", |_: &ProgramArgs| {
            Ok(Arc::new(CcProgram) as Arc<dyn VertexProgram>)
        });
        r
    }
}

impl ProgramRegistry {
    pub fn register(
        &mut self,
        name: &str,
        factory: impl Fn(&ProgramArgs) -> Result<Arc<dyn VertexProgram>> + Send + Sync + 'static,
    ) {
        self.factories.insert(name.to_string(), Arc::new(factory));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.factories.keys().map(String::as_str)
    }

    pub fn create(&self, name: &str, args: &ProgramArgs) -> Result<Arc<dyn VertexProgram>> {
        let f = self.factories.get(name).ok_or_else(|| {
            let known: Vec<&str> = self.names().collect();
            Error::Domain(format!(
                "unknown program {name}; known: {}",
                known.join(", ")
            ))
        })?;
        f(args)
    }
}
