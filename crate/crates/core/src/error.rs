// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ingest error at line {line}: {message}")]
    Ingest { line: usize, message: String },

    #[error("graph is empty")]
    EmptyGraph,

    #[error("schema error: {0}")]
    Schema(String),

    #[error("encoding {encoding} is not supported for {logical_type} columns")]
    UnsupportedEncoding {
        encoding: &'static str,
        logical_type: &'static str,
    },

    #[error("plan error: {0}")]
    Plan(String),

    #[error("plan validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("rewrite not applicable: {0}")]
    RewriteInapplicable(String),

    #[error("cannot lower vertex compute: {0}")]
    LoweringUnsupported(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("runtime error in superstep {superstep} (sender {sender}): {message}")]
    Runtime {
        superstep: u64,
        sender: i64,
        message: String,
    },

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("corrupt store file {path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    pub fn schema(msg: impl Into<String>) -> Self {
        Error::Schema(msg.into())
    }

    pub fn plan(msg: impl Into<String>) -> Self {
        Error::Plan(msg.into())
    }
}
