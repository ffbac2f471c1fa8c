//! Weak connectivity, giant-component extraction and industry subnetworks.

use crate::error::{Error, Result};
use crate::graph::{is_naics, EntityGraph};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentLabeling {
    /// Component id per node. Ids are numbered in order of each component's
    /// smallest node index.
    pub label: Vec<u32>,
    /// Size of each component, indexed by id.
    pub sizes: Vec<usize>,
    /// Largest component; ties go to the smallest id.
    pub gcc_id: u32,
}

impl ComponentLabeling {
    pub fn component_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn gcc_size(&self) -> usize {
        self.sizes.get(self.gcc_id as usize).copied().unwrap_or(0)
    }
}

/// Components of the graph with edge directions ignored.
pub fn connected_components(g: &EntityGraph) -> ComponentLabeling {
    let adj = g.undirected();
    let n = g.node_count();
    let mut label = vec![u32::MAX; n];
    let mut sizes = Vec::new();
    let mut stack = Vec::new();
    for root in 0..n {
        if label[root] != u32::MAX {
            continue;
        }
        let id = sizes.len() as u32;
        label[root] = id;
        stack.push(root as u32);
        let mut size = 0;
        while let Some(v) = stack.pop() {
            size += 1;
            for &w in adj.neighbors(v as usize) {
                if label[w as usize] == u32::MAX {
                    label[w as usize] = id;
                    stack.push(w);
                }
            }
        }
        sizes.push(size);
    }
    let mut gcc_id = 0u32;
    for (i, &s) in sizes.iter().enumerate() {
        if s > sizes[gcc_id as usize] {
            gcc_id = i as u32;
        }
    }
    ComponentLabeling {
        label,
        sizes,
        gcc_id,
    }
}

#[derive(Debug, Clone)]
pub struct Gcc {
    pub graph: EntityGraph,
    /// GCC nodes over nodes with at least one edge.
    pub fraction_in_gcc: f64,
}

pub fn extract_gcc(g: &EntityGraph) -> Result<Gcc> {
    if g.edge_count() == 0 {
        return Err(Error::EmptyNetwork("graph has no edges".into()));
    }
    let cc = connected_components(g);
    let with_edges = (0..g.node_count())
        .filter(|&v| g.out_degree(v) + g.in_degree(v) > 0)
        .count();
    let fraction_in_gcc = cc.gcc_size() as f64 / with_edges as f64;
    let graph = if cc.component_count() == 1 {
        g.clone()
    } else {
        let keep: Vec<bool> = cc.label.iter().map(|&l| l == cc.gcc_id).collect();
        g.induced_subgraph(&keep)
    };
    Ok(Gcc {
        graph,
        fraction_in_gcc,
    })
}

/// NAICS sectors that span a numeric range and count as one industry.
const RANGE_SECTORS: [&[&str]; 3] = [&["31", "32", "33"], &["44", "45"], &["48", "49"]];

pub fn naics_matches(code: &str, prefix: &str) -> bool {
    if prefix.len() == 2 {
        if let Some(group) = RANGE_SECTORS.iter().find(|g| g.contains(&prefix)) {
            return code.get(..2).is_some_and(|s| group.contains(&s));
        }
    }
    code.starts_with(prefix)
}

#[derive(Debug, Clone)]
pub struct IndustrySubnetwork {
    pub graph: EntityGraph,
    /// Share of subnetwork nodes whose own code is in the industry.
    pub match_fraction: f64,
}

/// Edges where the parent or the child is in the industry, with their
/// endpoints.
pub fn industry_subnetwork(g: &EntityGraph, naics_prefix: &str) -> Result<IndustrySubnetwork> {
    if !is_naics(naics_prefix) {
        return Err(Error::Precondition(format!(
            "NAICS prefix `{naics_prefix}` must be 2-6 digits"
        )));
    }
    let in_industry: Vec<bool> = g
        .nodes()
        .iter()
        .map(|n| {
            n.naics
                .as_deref()
                .is_some_and(|c| naics_matches(c, naics_prefix))
        })
        .collect();
    let graph = g.edge_subgraph(|e| in_industry[e.parent] || in_industry[e.child]);
    if graph.edge_count() == 0 {
        return Err(Error::EmptyNetwork(format!(
            "no edges touch NAICS {naics_prefix}"
        )));
    }
    let matching = graph
        .nodes()
        .iter()
        .filter(|n| {
            n.naics
                .as_deref()
                .is_some_and(|c| naics_matches(c, naics_prefix))
        })
        .count();
    Ok(IndustrySubnetwork {
        match_fraction: matching as f64 / graph.node_count() as f64,
        graph,
    })
}
