use std::io;

use thiserror::Error;

/// Errors raised by graph construction, sampling, estimation and the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("node {node} out of range for graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("self-loop on node {0}")]
    SelfLoop(usize),

    #[error("graph contains a directed cycle")]
    Cycle,

    #[error("sortability undefined: graph has no edges")]
    NoEdges,

    #[error("column {0} is constant (zero sample variance)")]
    ConstantColumn(usize),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("size guard: {what} requires n <= {max}, got {n}")]
    SizeGuard { what: &'static str, n: usize, max: usize },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
