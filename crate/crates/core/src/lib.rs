//! Measurement suite for directed ownership networks.

pub mod components;
pub mod consolidation;
pub mod degree;
pub mod error;
pub mod graph;
pub mod ingest;
pub mod motifs;
pub mod paths;
pub mod powerlaw;
pub mod report;
pub mod seed;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use graph::{build_graph, Direction, EdgeRecord, EntityGraph, NodeKind, NodeRecord};
