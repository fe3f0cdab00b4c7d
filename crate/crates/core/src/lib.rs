// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

//! A single-node columnar relational engine for graph analytics.

pub mod algos;
pub mod analytics;
pub mod error;
pub mod exec;
pub mod expr;
pub mod gen;
pub mod plan;
pub mod report;
pub mod run;
pub mod runtime;
pub mod storage;
pub mod verify;

pub use error::{Error, Result};
