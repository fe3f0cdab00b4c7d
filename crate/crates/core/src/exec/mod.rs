// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

pub mod agg;
pub mod batch;
pub mod executor;
pub mod keys;
pub mod ops;
pub mod vertex_udf;

pub use batch::{Batch, Field, RowTracker, Schema, DEFAULT_BATCH_SIZE};
pub use executor::{execute, AggMode, ExecOptions, ExecReport, ExecResult, OperatorReport};
