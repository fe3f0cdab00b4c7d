// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

use std::path::PathBuf;
use web_time::Instant;

use super::adjacency::Adjacency;
use super::{
    output_table, unknown_vertex, Context, Message, Outgoing, RuntimeOptions, RuntimeOutput,
    SuperstepRecord, Value, VertexProgram,
};
use crate::error::{Error, Result};
use crate::storage::persist::{decode_table, encode_table};
use crate::storage::{partition_of_i64, Column, ColumnData, ColumnTable, GraphStore, LogicalType};

/// One materialized table: encoded bytes kept in memory or spilled to a file.
#[derive(Debug)]
enum Blob {
    Memory(Vec<u8>),
    File(PathBuf, u64),
}

impl Blob {
    fn write(table: &ColumnTable, spill: Option<&PathBuf>, name: &str) -> Result<Blob> {
        let bytes = encode_table(table);
        match spill {
            None => Ok(Blob::Memory(bytes)),
            Some(dir) => {
                let path = dir.join(format!("{name}.tbl"));
                std::fs::write(&path, &bytes)
                    .map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
                Ok(Blob::File(path, bytes.len() as u64))
            }
        }
    }

    fn len(&self) -> u64 {
        match self {
            Blob::Memory(b) => b.len() as u64,
            Blob::File(_, n) => *n,
        }
    }

    fn read(&self, name: &str) -> Result<ColumnTable> {
        let format = |path: PathBuf, message: String| Error::Format { path, message };
        match self {
            Blob::Memory(b) => decode_table(name, b).map_err(|m| format(PathBuf::from(name), m)),
            Blob::File(path, _) => {
                let bytes = std::fs::read(path)
                    .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
                decode_table(name, &bytes).map_err(|m| format(path.clone(), m))
            }
        }
    }
}

/// The stored V⋈E side of one partition: its vertices and their out-edges.
struct PartitionGraph {
    /// Positions in the global adjacency, ascending.
    vertices: Vec<usize>,
    edge_bytes: u64,
}

/// What one partition produced in one superstep.
struct PartitionOutput {
    vertex: Blob,
    /// Messages bound for each destination partition.
    messages: Vec<Blob>,
    active: usize,
    sent: usize,
    any_running: bool,
    bytes_read: u64,
}

fn value_column(ty: LogicalType, values: &[Value]) -> ColumnData {
    match ty {
        LogicalType::Float64 => values.iter().map(|v| v.as_f64()).collect::<Vec<_>>().into(),
        _ => values.iter().map(|v| v.as_i64()).collect::<Vec<_>>().into(),
    }
}

fn read_values(table: &ColumnTable, column: &str) -> Result<Vec<Value>> {
    let data = &table.column(column)?.data;
    Ok(match (data.as_i64(), data.as_f64()) {
        (Some(v), _) => v.iter().map(|&x| Value::Int(x)).collect(),
        (_, Some(v)) => v.iter().map(|&x| Value::Float(x)).collect(),
        _ => return Err(Error::schema(format!("{column} must be numeric"))),
    })
}

fn vertex_table(
    ty: LogicalType,
    ids: Vec<i64>,
    values: &[Value],
    halted: Vec<bool>,
) -> Result<ColumnTable> {
    ColumnTable::new(
        "v",
        vec![
            Column::new("id", ids),
            Column::new("value", value_column(ty, values)),
            Column::new(
                "halted",
                halted.into_iter().map(i64::from).collect::<Vec<_>>(),
            ),
        ],
    )
}

fn message_table(ty: LogicalType, rows: &[(i64, Message)]) -> Result<ColumnTable> {
    let values: Vec<Value> = rows.iter().map(|r| r.1.value).collect();
    ColumnTable::new(
        "m",
        vec![
            Column::new("dst", rows.iter().map(|r| r.0).collect::<Vec<_>>()),
            Column::new(
                "sender",
                rows.iter().map(|r| r.1.sender).collect::<Vec<_>>(),
            ),
            Column::new("value", value_column(ty, &values)),
        ],
    )
}

/// Runs `program` as a table UDF: each superstep the vertex and message
/// tables are hash-partitioned by vertex id, merged with the partition's
/// edges in id order, passed through the program vertex by vertex, and the
/// resulting V′ and M′ are materialized as encoded tables.
pub fn run_table_udf(
    graph: &GraphStore,
    program: &dyn VertexProgram,
    opts: &RuntimeOptions,
) -> Result<RuntimeOutput> {
    let adj = Adjacency::build(graph, program.neighbors())?;
    let n = adj.len();
    let parts = if opts.partitions == 0 {
        graph.partitions()
    } else {
        opts.partitions
    }
    .max(1);
    let ty = program.value_type();
    let spill = opts.spill_dir.as_ref();
    if let Some(dir) = spill {
        std::fs::create_dir_all(dir)
            .map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
    }

    let mut graphs: Vec<PartitionGraph> = (0..parts)
        .map(|_| PartitionGraph {
            vertices: Vec::new(),
            edge_bytes: 0,
        })
        .collect();
    let edge_row_bytes = if adj.weights.is_some() { 24 } else { 16 };
    for (v, &id) in adj.ids.iter().enumerate() {
        let g = &mut graphs[partition_of_i64(id, parts)];
        g.vertices.push(v);
        g.edge_bytes += (adj.row(v).len() * edge_row_bytes) as u64;
    }

    // Superstep 0 input: initial states, nothing halted, no messages.
    let mut vertex_blobs = Vec::with_capacity(parts);
    let mut message_blobs: Vec<Vec<Blob>> = Vec::with_capacity(parts);
    for (p, g) in graphs.iter().enumerate() {
        let ids: Vec<i64> = g.vertices.iter().map(|&v| adj.ids[v]).collect();
        let values: Vec<Value> = ids.iter().map(|&id| program.initial_state(id, n)).collect();
        let halted = vec![false; ids.len()];
        vertex_blobs.push(Blob::write(
            &vertex_table(ty, ids, &values, halted)?,
            spill,
            &format!("v_0_{p}"),
        )?);
        message_blobs.push(Vec::new());
    }

    let mut records = Vec::new();
    let mut running = true;
    for superstep in 0..opts.max_supersteps {
        if !running {
            break;
        }
        let started = Instant::now();
        let run = |p: usize| {
            let inbound: Vec<&Blob> = message_blobs.iter().filter_map(|m| m.get(p)).collect();
            run_partition(
                program,
                &adj,
                &graphs[p],
                &vertex_blobs[p],
                &inbound,
                superstep,
                parts,
                spill,
                p,
            )
        };
        let outputs: Vec<Result<PartitionOutput>> = if parts == 1 {
            vec![run(0)]
        } else {
            std::thread::scope(|s| {
                let handles: Vec<_> = (0..parts).map(|p| s.spawn(move || run(p))).collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("partition panicked"))
                    .collect()
            })
        };
        let mut record = SuperstepRecord {
            superstep,
            ..SuperstepRecord::default()
        };
        running = false;
        vertex_blobs.clear();
        message_blobs.clear();
        for out in outputs {
            let out = out?;
            record.active += out.active;
            record.messages += out.sent;
            record.bytes_read += out.bytes_read;
            record.bytes_written +=
                out.vertex.len() + out.messages.iter().map(Blob::len).sum::<u64>();
            running |= out.any_running || out.sent > 0;
            vertex_blobs.push(out.vertex);
            message_blobs.push(out.messages);
        }
        record.wall = started.elapsed();
        records.push(record);
    }

    let mut ids = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for blob in &vertex_blobs {
        let t = blob.read("v")?;
        ids.extend_from_slice(t.i64_column("id")?);
        values.extend(read_values(&t, "value")?);
    }
    let mut order: Vec<usize> = (0..ids.len()).collect();
    order.sort_unstable_by_key(|&i| ids[i]);
    let values: Vec<Value> = order.iter().map(|&i| values[i]).collect();
    let ids: Vec<i64> = order.iter().map(|&i| ids[i]).collect();
    Ok(RuntimeOutput {
        table: output_table(program, ids, &values)?,
        supersteps: records,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_partition(
    program: &dyn VertexProgram,
    adj: &Adjacency,
    graph: &PartitionGraph,
    vertex_blob: &Blob,
    inbound: &[&Blob],
    superstep: u64,
    parts: usize,
    spill: Option<&PathBuf>,
    p: usize,
) -> Result<PartitionOutput> {
    let ty = program.value_type();
    let n = adj.len();
    let mut bytes_read = vertex_blob.len() + graph.edge_bytes;
    let v = vertex_blob.read("v")?;
    let ids = v.i64_column("id")?.to_vec();
    let mut values = read_values(&v, "value")?;
    let mut halted: Vec<bool> = v.i64_column("halted")?.iter().map(|&h| h != 0).collect();

    // Inbound messages sorted by (dst, sender, value).
    let mut inbox: Vec<(i64, Message)> = Vec::new();
    for blob in inbound {
        bytes_read += blob.len();
        let m = blob.read("m")?;
        let dst = m.i64_column("dst")?;
        let sender = m.i64_column("sender")?;
        let vals = read_values(&m, "value")?;
        inbox.extend((0..dst.len()).map(|i| {
            (
                dst[i],
                Message {
                    sender: sender[i],
                    value: vals[i],
                },
            )
        }));
    }
    inbox.sort_unstable();

    let mut outgoing: Vec<Vec<(i64, Message)>> = (0..parts).map(|_| Vec::new()).collect();
    let mut out = Vec::new();
    let mut messages: Vec<Message> = Vec::new();
    let mut cursor = 0;
    let mut active = 0;
    let mut sent = 0;
    for (i, &id) in ids.iter().enumerate() {
        let vpos = graph.vertices[i];
        debug_assert_eq!(adj.ids[vpos], id);
        messages.clear();
        while cursor < inbox.len() && inbox[cursor].0 < id {
            // Messages to vertices absent from this partition were rejected
            // at send time, so nothing is skipped here.
            cursor += 1;
        }
        while cursor < inbox.len() && inbox[cursor].0 == id {
            messages.push(inbox[cursor].1);
            cursor += 1;
        }
        if halted[i] && messages.is_empty() {
            continue;
        }
        active += 1;
        let row = adj.row(vpos);
        let weights = adj.weights.as_ref().map(|w| &w[row.clone()]);
        out.clear();
        let mut ctx = Context::new(
            superstep,
            id,
            n,
            values[i],
            &messages,
            &adj.target_ids[row.clone()],
            weights,
            &mut out,
        );
        program.compute(&mut ctx);
        values[i] = ctx.value;
        halted[i] = ctx.halted();
        for o in &out {
            match *o {
                Outgoing::AllNeighbors(value) => {
                    for &t in &adj.target_ids[row.clone()] {
                        outgoing[partition_of_i64(t, parts)]
                            .push((t, Message { sender: id, value }));
                        sent += 1;
                    }
                }
                Outgoing::To(dst, value) => {
                    if adj.position(dst).is_none() {
                        return Err(unknown_vertex(superstep, id, dst));
                    }
                    outgoing[partition_of_i64(dst, parts)]
                        .push((dst, Message { sender: id, value }));
                    sent += 1;
                }
            }
        }
    }
    let any_running = halted.iter().any(|h| !h);
    let vertex = Blob::write(
        &vertex_table(ty, ids, &values, halted)?,
        spill,
        &format!("v_{}_{p}", superstep + 1),
    )?;
    let messages = outgoing
        .iter()
        .enumerate()
        .map(|(q, rows)| {
            Blob::write(
                &message_table(ty, rows)?,
                spill,
                &format!("m_{}_{p}_{q}", superstep + 1),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PartitionOutput {
        vertex,
        messages,
        active,
        sent,
        any_running,
        bytes_read,
    })
}
