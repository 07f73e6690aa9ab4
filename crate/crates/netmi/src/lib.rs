//! Degree/attribute information measures for networks with a binary node
//! attribute, plus tooling to lower those measures by randomized edge
//! addition.
//!
//! The crate is organized around a small pipeline:
//!
//! 1. [`graph::AttributedMultigraph`] — undirected multigraph with a binary
//!    attribute per node, loaded from plain edge/attribute files.
//! 2. [`dist`] — remaining-degree distributions and the joint
//!    degree-and-attribute matrix (JDAM) with all of its marginals.
//! 3. [`measures`] — Shannon and Rényi entropies and the mutual-information
//!    quantities computed from the JDAM, including the headline
//!    attribute-conditional measure.
//! 4. [`assortativity`] — Newman degree/attribute assortativity baselines.
//! 5. [`generators`] — seeded SBM and preferential-attachment growth models.
//! 6. [`edge_space`] / [`spsa`] — the degree-attribute edge-class space, a
//!    conditional-logit sampler over it, and an SPSA loop that tunes the
//!    sampler to raise or lower the measure.
//! 7. [`experiments`] — reproducible sweep/intervention/temporal drivers.

pub mod assortativity;
pub mod dist;
pub mod edge_space;
pub mod error;
pub mod experiments;
pub mod generators;
pub mod graph;
pub mod io;
pub mod measures;
pub mod numeric;
pub mod spsa;

pub use error::Error;
pub use graph::{Attribute, AttributedMultigraph, GraphSnapshot, NodeId};
pub use measures::{MeasureReport, RenyiOrder};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
