//! Subgraph censuses, directed cycles and shortcut ownership edges.

pub mod canon;
mod census;
mod cycles;
mod esu;
mod shortcuts;

pub use census::{
    connected_quad_bound, enumerate_census, four_node_census, four_node_census_with, triad_census,
    CensusMode, MotifCensus, Sampling, DEFAULT_BUDGET, DEFAULT_SAMPLE_TARGET,
};
pub(crate) use cycles::nontrivial_sccs;
pub use cycles::{count_simple_cycles, CycleReport, DEFAULT_CYCLE_CAP};
pub use shortcuts::{
    count_shortcut_edges, count_shortcut_edges_within, shortcut_flags, ShortcutReport,
};
