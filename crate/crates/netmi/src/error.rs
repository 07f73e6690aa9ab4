//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by graph construction, measurement, generation, and
/// optimization.
#[derive(Debug, Error)]
pub enum Error {
    #[error("self-loop rejected on node {node}")]
    SelfLoopRejected { node: u32 },

    #[error("unknown node id {id}")]
    UnknownNode { id: u32 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("node {node} referenced by an edge has no attribute row")]
    MissingAttribute { node: String },

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("degree distribution has zero mean; remaining-degree distribution undefined")]
    DegenerateDistribution,

    #[error("JDAM has no mass")]
    EmptyJdam,

    #[error("distribution not normalized: sums to {sum}")]
    NotNormalized { sum: f64 },

    #[error("joint distribution violates its sum rules: {detail}")]
    SumRuleViolation { detail: String },

    #[error("Rényi order must be finite and > 0, got {alpha}")]
    InvalidAlpha { alpha: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no connected sample after {attempts} attempts")]
    ConnectivityRetriesExhausted { attempts: usize },

    #[error("logit parameters contain a non-finite entry")]
    NonFiniteTheta,

    #[error("degree-attribute group (k={k}, c={attr}) has no usable node")]
    EmptyGroup { k: usize, attr: i8 },

    #[error("JDAM cell ({row}, {col}) has insufficient mass for the single-cell move")]
    NegativeCell { row: usize, col: usize },

    #[error("no edge class with nonempty groups carries probability mass")]
    ExhaustedClasses,

    #[error("series degenerate: need equal lengths >= 2 and nonzero variance")]
    DegenerateSeries,

    #[error("too few usable replicates: {valid} (need at least 10)")]
    TooFewValidReplicates { valid: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
