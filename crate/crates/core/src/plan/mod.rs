// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

pub mod logical;
pub mod physical;
pub mod rewrite;

pub use logical::*;
pub use physical::{choose_physical, props, Props};
pub use rewrite::{
    build_vertex_centric_plan, eliminate_message_table, eliminate_redundant_join,
    lower_vertex_compute, reverse_edges, send_expr, substitute_columns, with_sender_table,
    MESSAGE_TABLE, OUTBOUND_TABLE, PAGERANK_DAMPING, PAGERANK_TELEPORT,
};
