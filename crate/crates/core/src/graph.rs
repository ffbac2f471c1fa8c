//! Immutable directed entity graph.
//!
//! Nodes are stored sorted by id and edges sorted by `(parent, child)`, so a
//! graph built from any permutation of the same records is identical.
//! Adjacency is kept in compressed sparse row form with `u32` neighbor
//! indices; the undirected simplification is derived lazily on first use.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    TbPartnership,
    NontbPartnership,
    SCorp,
    CCorp,
    Reit,
    Person,
    TrustEstate,
    Nonprofit,
    Foreign,
    Other,
}

impl NodeKind {
    pub const ALL: [NodeKind; 10] = [
        NodeKind::TbPartnership,
        NodeKind::NontbPartnership,
        NodeKind::SCorp,
        NodeKind::CCorp,
        NodeKind::Reit,
        NodeKind::Person,
        NodeKind::TrustEstate,
        NodeKind::Nonprofit,
        NodeKind::Foreign,
        NodeKind::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::TbPartnership => "tb_partnership",
            NodeKind::NontbPartnership => "nontb_partnership",
            NodeKind::SCorp => "s_corp",
            NodeKind::CCorp => "c_corp",
            NodeKind::Reit => "reit",
            NodeKind::Person => "person",
            NodeKind::TrustEstate => "trust_estate",
            NodeKind::Nonprofit => "nonprofit",
            NodeKind::Foreign => "foreign",
            NodeKind::Other => "other",
        }
    }
}

impl FromStr for NodeKind {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        let lower = s.trim().to_ascii_lowercase();
        NodeKind::ALL
            .into_iter()
            .find(|k| k.as_str() == lower)
            .ok_or(())
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: String,
    pub kind: NodeKind,
    pub naics: Option<String>,
    pub assets: Option<f64>,
    pub wages: Option<f64>,
}

impl NodeRecord {
    pub fn new(id: impl Into<String>, kind: NodeKind) -> Self {
        NodeRecord {
            id: id.into(),
            kind,
            naics: None,
            assets: None,
            wages: None,
        }
    }

    pub fn with_naics(mut self, naics: impl Into<String>) -> Self {
        self.naics = Some(naics.into());
        self
    }

    pub fn with_assets(mut self, assets: f64) -> Self {
        self.assets = Some(assets);
        self
    }

    pub fn with_wages(mut self, wages: f64) -> Self {
        self.wages = Some(wages);
        self
    }

    /// Two-digit NAICS sector, if a code is present.
    pub fn sector(&self) -> Option<&str> {
        self.naics.as_deref().and_then(|n| n.get(..2))
    }

    pub(crate) fn validate(&self, row: u64) -> Result<()> {
        if self.id.trim().is_empty() {
            return Err(Error::InvalidField {
                row,
                field: "id",
                message: "empty id".into(),
            });
        }
        if let Some(code) = &self.naics {
            if !is_naics(code) {
                return Err(Error::InvalidField {
                    row,
                    field: "naics",
                    message: format!("`{code}` is not a 2-6 digit code"),
                });
            }
        }
        for (field, value) in [("assets", self.assets), ("wages", self.wages)] {
            if let Some(v) = value {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidField {
                        row,
                        field,
                        message: format!("{v} is not a finite nonnegative amount"),
                    });
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn is_naics(code: &str) -> bool {
    (2..=6).contains(&code.len()) && code.bytes().all(|b| b.is_ascii_digit())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeSource {
    ParentReport,
    ChildReport,
    Merged,
}

impl EdgeSource {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeSource::ParentReport => "parent_report",
            EdgeSource::ChildReport => "child_report",
            EdgeSource::Merged => "merged",
        }
    }

    // Child-side filings state the parent's share of the child directly.
    fn share_priority(self) -> u8 {
        match self {
            EdgeSource::ChildReport => 2,
            EdgeSource::Merged => 1,
            EdgeSource::ParentReport => 0,
        }
    }
}

impl FromStr for EdgeSource {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        match s.trim().to_ascii_lowercase().as_str() {
            "parent_report" => Ok(EdgeSource::ParentReport),
            "child_report" => Ok(EdgeSource::ChildReport),
            "merged" | "" => Ok(EdgeSource::Merged),
            _ => Err(()),
        }
    }
}

/// Ownership link as reported, referring to nodes by id. `share` is a
/// fraction of the child.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub parent_id: String,
    pub child_id: String,
    pub share: Option<f64>,
    pub source: EdgeSource,
}

impl EdgeRecord {
    pub fn new(parent: impl Into<String>, child: impl Into<String>) -> Self {
        EdgeRecord {
            parent_id: parent.into(),
            child_id: child.into(),
            share: None,
            source: EdgeSource::Merged,
        }
    }

    pub fn with_share(mut self, share: f64) -> Self {
        self.share = Some(share);
        self
    }

    pub fn with_source(mut self, source: EdgeSource) -> Self {
        self.source = source;
        self
    }
}

/// Collapses the share reports of one `(parent, child)` pair into a single
/// share. Returns the chosen share and whether the present shares disagreed.
///
/// The share from the highest-priority source wins (child report, then
/// merged, then parent report); within one source the largest share wins.
pub(crate) fn reconcile_shares<I>(reports: I) -> (Option<f64>, bool)
where
    I: IntoIterator<Item = (Option<f64>, EdgeSource)>,
{
    let mut best: Option<(u8, f64)> = None;
    let mut first: Option<f64> = None;
    let mut discrepant = false;
    for (share, source) in reports {
        let Some(s) = share else { continue };
        match first {
            None => first = Some(s),
            Some(f) if f != s => discrepant = true,
            _ => {}
        }
        let candidate = (source.share_priority(), s);
        best = match best {
            Some(b) if (b.0, b.1) >= (candidate.0, candidate.1) => Some(b),
            _ => Some(candidate),
        };
    }
    (best.map(|b| b.1), discrepant)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    In,
    Out,
}

/// Resolved edge between dense node indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub parent: usize,
    pub child: usize,
    pub share: Option<f64>,
}

/// Compressed sparse row adjacency.
#[derive(Debug, Clone, Default)]
pub struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Adjacency {
    pub fn node_count(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Sum of list lengths; twice the edge count for undirected views.
    pub fn entry_count(&self) -> usize {
        self.targets.len()
    }

    #[inline]
    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// Builds from `(from, to)` pairs; lists come out sorted and deduplicated.
    pub(crate) fn from_pairs(n: usize, pairs: &mut Vec<(u32, u32)>) -> Adjacency {
        pairs.sort_unstable();
        pairs.dedup();
        let mut offsets = vec![0usize; n + 1];
        for &(u, _) in pairs.iter() {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let targets = pairs.iter().map(|&(_, v)| v).collect();
        Adjacency { offsets, targets }
    }
}

/// Immutable ownership network.
#[derive(Debug)]
pub struct EntityGraph {
    nodes: Vec<NodeRecord>,
    edges: Vec<Edge>,
    out_offsets: Vec<usize>,
    out_targets: Vec<u32>,
    in_offsets: Vec<usize>,
    in_sources: Vec<u32>,
    in_edge_ids: Vec<u32>,
    year: Option<i32>,
    share_discrepancies: usize,
    undirected: OnceLock<Adjacency>,
}

impl Clone for EntityGraph {
    fn clone(&self) -> Self {
        let undirected = OnceLock::new();
        if let Some(u) = self.undirected.get() {
            let _ = undirected.set(u.clone());
        }
        EntityGraph {
            nodes: self.nodes.clone(),
            edges: self.edges.clone(),
            out_offsets: self.out_offsets.clone(),
            out_targets: self.out_targets.clone(),
            in_offsets: self.in_offsets.clone(),
            in_sources: self.in_sources.clone(),
            in_edge_ids: self.in_edge_ids.clone(),
            year: self.year,
            share_discrepancies: self.share_discrepancies,
            undirected,
        }
    }
}

/// Builds a graph from raw records. Duplicate `(parent, child)` pairs are
/// merged with the same share reconciliation as [`crate::ingest::dedupe_edges`].
pub fn build_graph(mut nodes: Vec<NodeRecord>, edges: Vec<EdgeRecord>) -> Result<EntityGraph> {
    for (i, node) in nodes.iter().enumerate() {
        node.validate(i as u64 + 1)?;
    }
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&a, &b| nodes[a].id.cmp(&nodes[b].id).then(a.cmp(&b)));
    for w in order.windows(2) {
        if nodes[w[0]].id == nodes[w[1]].id {
            return Err(Error::DuplicateNode {
                row: w[1] as u64 + 1,
                id: nodes[w[1]].id.clone(),
            });
        }
    }
    let mut slots: Vec<Option<NodeRecord>> = nodes.drain(..).map(Some).collect();
    let nodes: Vec<NodeRecord> = order
        .iter()
        .map(|&i| slots[i].take().expect("each index used once"))
        .collect();

    let lookup = |id: &str| nodes.binary_search_by(|n| n.id.as_str().cmp(id)).ok();
    let mut resolved: Vec<(usize, usize, Option<f64>, EdgeSource)> =
        Vec::with_capacity(edges.len());
    for (i, e) in edges.iter().enumerate() {
        let row = i as u64 + 1;
        let parent = lookup(&e.parent_id).ok_or_else(|| Error::UnknownNode {
            row,
            id: e.parent_id.clone(),
        })?;
        let child = lookup(&e.child_id).ok_or_else(|| Error::UnknownNode {
            row,
            id: e.child_id.clone(),
        })?;
        if parent == child {
            return Err(Error::SelfLoop {
                row,
                id: e.parent_id.clone(),
            });
        }
        if let Some(s) = e.share {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::InvalidField {
                    row,
                    field: "share",
                    message: format!("{s} is not a positive fraction"),
                });
            }
        }
        resolved.push((parent, child, e.share, e.source));
    }
    resolved.sort_by_key(|a| (a.0, a.1));

    let mut merged = Vec::with_capacity(resolved.len());
    let mut discrepancies = 0;
    let mut start = 0;
    while start < resolved.len() {
        let key = (resolved[start].0, resolved[start].1);
        let mut end = start + 1;
        while end < resolved.len() && (resolved[end].0, resolved[end].1) == key {
            end += 1;
        }
        let (share, discrepant) = reconcile_shares(resolved[start..end].iter().map(|r| (r.2, r.3)));
        discrepancies += usize::from(discrepant);
        merged.push(Edge {
            parent: key.0,
            child: key.1,
            share,
        });
        start = end;
    }
    let mut g = EntityGraph::from_sorted(nodes, merged);
    g.share_discrepancies = discrepancies;
    Ok(g)
}

impl EntityGraph {
    /// `edges` must be sorted by `(parent, child)`, deduplicated, and loop-free.
    pub(crate) fn from_sorted(nodes: Vec<NodeRecord>, edges: Vec<Edge>) -> EntityGraph {
        let n = nodes.len();
        assert!(n <= u32::MAX as usize, "node count exceeds u32 index space");
        debug_assert!(edges
            .windows(2)
            .all(|w| (w[0].parent, w[0].child) < (w[1].parent, w[1].child)));

        let mut out_offsets = vec![0usize; n + 1];
        let mut in_offsets = vec![0usize; n + 1];
        for e in &edges {
            out_offsets[e.parent + 1] += 1;
            in_offsets[e.child + 1] += 1;
        }
        for i in 0..n {
            out_offsets[i + 1] += out_offsets[i];
            in_offsets[i + 1] += in_offsets[i];
        }
        let out_targets = edges.iter().map(|e| e.child as u32).collect();

        // Counting sort by child keeps parents ascending within each list.
        let mut cursor = in_offsets.clone();
        let mut in_sources = vec![0u32; edges.len()];
        let mut in_edge_ids = vec![0u32; edges.len()];
        for (i, e) in edges.iter().enumerate() {
            let slot = cursor[e.child];
            in_sources[slot] = e.parent as u32;
            in_edge_ids[slot] = i as u32;
            cursor[e.child] += 1;
        }

        EntityGraph {
            nodes,
            edges,
            out_offsets,
            out_targets,
            in_offsets,
            in_sources,
            in_edge_ids,
            year: None,
            share_discrepancies: 0,
            undirected: OnceLock::new(),
        }
    }

    pub fn with_year(mut self, year: i32) -> Self {
        self.year = Some(year);
        self
    }

    pub fn year(&self) -> Option<i32> {
        self.year
    }

    /// Number of `(parent, child)` pairs whose reported shares disagreed.
    pub fn share_discrepancies(&self) -> usize {
        self.share_discrepancies
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[NodeRecord] {
        &self.nodes
    }

    pub fn node(&self, v: usize) -> &NodeRecord {
        &self.nodes[v]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.nodes.binary_search_by(|n| n.id.as_str().cmp(id)).ok()
    }

    #[inline]
    pub fn out_neighbors(&self, v: usize) -> &[u32] {
        &self.out_targets[self.out_offsets[v]..self.out_offsets[v + 1]]
    }

    #[inline]
    pub fn in_neighbors(&self, v: usize) -> &[u32] {
        &self.in_sources[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    /// Indices into [`EntityGraph::edges`] of the edges leaving `v`.
    pub fn out_edge_range(&self, v: usize) -> Range<usize> {
        self.out_offsets[v]..self.out_offsets[v + 1]
    }

    /// Indices into [`EntityGraph::edges`] of the edges entering `v`.
    pub fn in_edge_ids(&self, v: usize) -> &[u32] {
        &self.in_edge_ids[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    #[inline]
    pub fn out_degree(&self, v: usize) -> usize {
        self.out_offsets[v + 1] - self.out_offsets[v]
    }

    #[inline]
    pub fn in_degree(&self, v: usize) -> usize {
        self.in_offsets[v + 1] - self.in_offsets[v]
    }

    pub fn degree(&self, v: usize, direction: Direction) -> usize {
        match direction {
            Direction::In => self.in_degree(v),
            Direction::Out => self.out_degree(v),
        }
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.out_neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// Undirected simplification: antiparallel pairs collapse to one link.
    pub fn undirected(&self) -> &Adjacency {
        self.undirected.get_or_init(|| {
            let mut pairs = Vec::with_capacity(self.edges.len() * 2);
            for e in &self.edges {
                pairs.push((e.parent as u32, e.child as u32));
                pairs.push((e.child as u32, e.parent as u32));
            }
            Adjacency::from_pairs(self.nodes.len(), &mut pairs)
        })
    }

    /// Subgraph induced by the nodes with `keep[v]`, preserving node order.
    pub fn induced_subgraph(&self, keep: &[bool]) -> EntityGraph {
        assert_eq!(keep.len(), self.nodes.len());
        let mut remap = vec![u32::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        for (v, node) in self.nodes.iter().enumerate() {
            if keep[v] {
                remap[v] = nodes.len() as u32;
                nodes.push(node.clone());
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| keep[e.parent] && keep[e.child])
            .map(|e| Edge {
                parent: remap[e.parent] as usize,
                child: remap[e.child] as usize,
                share: e.share,
            })
            .collect();
        let mut g = EntityGraph::from_sorted(nodes, edges);
        g.year = self.year;
        g
    }

    /// Subgraph made of the selected edges and their endpoints.
    pub fn edge_subgraph(&self, keep_edge: impl Fn(&Edge) -> bool) -> EntityGraph {
        let selected: Vec<&Edge> = self.edges.iter().filter(|e| keep_edge(e)).collect();
        let mut used = vec![false; self.nodes.len()];
        for e in &selected {
            used[e.parent] = true;
            used[e.child] = true;
        }
        let mut remap = vec![u32::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        for (v, node) in self.nodes.iter().enumerate() {
            if used[v] {
                remap[v] = nodes.len() as u32;
                nodes.push(node.clone());
            }
        }
        let edges = selected
            .into_iter()
            .map(|e| Edge {
                parent: remap[e.parent] as usize,
                child: remap[e.child] as usize,
                share: e.share,
            })
            .collect();
        let mut g = EntityGraph::from_sorted(nodes, edges);
        g.year = self.year;
        g
    }

    /// Converts back to raw records, e.g. for CSV export.
    pub fn to_records(&self) -> (Vec<NodeRecord>, Vec<EdgeRecord>) {
        let edges = self
            .edges
            .iter()
            .map(|e| EdgeRecord {
                parent_id: self.nodes[e.parent].id.clone(),
                child_id: self.nodes[e.child].id.clone(),
                share: e.share,
                source: EdgeSource::Merged,
            })
            .collect();
        (self.nodes.clone(), edges)
    }
}

/// Checked degree lookup.
pub fn degree_of(g: &EntityGraph, v: usize, direction: Direction) -> Result<usize> {
    if v >= g.node_count() {
        return Err(Error::NodeOutOfRange {
            index: v,
            len: g.node_count(),
        });
    }
    Ok(g.degree(v, direction))
}

#[cfg(test)]
pub(crate) mod test_util {
    use super::*;

    /// Graph with default-kind nodes named by the given ids.
    pub fn graph(ids: &[&str], edges: &[(&str, &str)]) -> EntityGraph {
        let nodes = ids
            .iter()
            .map(|id| NodeRecord::new(*id, NodeKind::TbPartnership))
            .collect();
        let edges = edges.iter().map(|(p, c)| EdgeRecord::new(*p, *c)).collect();
        build_graph(nodes, edges).unwrap()
    }

    /// Graph on nodes `0..n` (ids zero-padded so index order is preserved).
    pub fn indexed(n: usize, edges: &[(usize, usize)]) -> EntityGraph {
        let nodes = (0..n)
            .map(|i| NodeRecord::new(format!("n{i:04}"), NodeKind::TbPartnership))
            .collect();
        let edges = edges
            .iter()
            .map(|&(p, c)| EdgeRecord::new(format!("n{p:04}"), format!("n{c:04}")))
            .collect();
        build_graph(nodes, edges).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::test_util::*;
    use super::*;

    #[test]
    fn smallest_graph() {
        let g = graph(&["A", "B"], &[("A", "B")]);
        let a = g.index_of("A").unwrap();
        let b = g.index_of("B").unwrap();
        assert_eq!(g.out_degree(a), 1);
        assert_eq!(g.in_degree(b), 1);
    }

    #[test]
    fn single_node_no_edges() {
        let g = graph(&["A"], &[]);
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(degree_of(&g, 0, Direction::In).unwrap(), 0);
        assert_eq!(degree_of(&g, 0, Direction::Out).unwrap(), 0);
    }

    #[test]
    fn duplicate_pairs_merge() {
        let g = graph(&["A", "B", "C"], &[("A", "B"), ("A", "B"), ("A", "C")]);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.out_degree(g.index_of("A").unwrap()), 2);
    }

    #[test]
    fn star_and_chain_degrees() {
        let g = graph(
            &["P", "C1", "C2", "C3", "C4", "C5"],
            &[
                ("P", "C1"),
                ("P", "C2"),
                ("P", "C3"),
                ("P", "C4"),
                ("P", "C5"),
            ],
        );
        assert_eq!(
            degree_of(&g, g.index_of("P").unwrap(), Direction::Out).unwrap(),
            5
        );
        assert_eq!(
            degree_of(&g, g.index_of("C1").unwrap(), Direction::In).unwrap(),
            1
        );

        let chain = graph(&["A", "B", "C"], &[("A", "B"), ("B", "C")]);
        let b = chain.index_of("B").unwrap();
        assert_eq!(degree_of(&chain, b, Direction::In).unwrap(), 1);
        assert_eq!(degree_of(&chain, b, Direction::Out).unwrap(), 1);
    }

    #[test]
    fn out_of_range_degree() {
        let g = graph(&["A"], &[]);
        assert!(matches!(
            degree_of(&g, 3, Direction::Out),
            Err(Error::NodeOutOfRange { index: 3, len: 1 })
        ));
    }

    #[test]
    fn unknown_node_and_self_loop_rejected() {
        let nodes = vec![NodeRecord::new("A", NodeKind::Person)];
        let err = build_graph(nodes.clone(), vec![EdgeRecord::new("A", "Z")]).unwrap_err();
        assert!(matches!(err, Error::UnknownNode { row: 1, ref id } if id == "Z"));
        let err = build_graph(nodes, vec![EdgeRecord::new("A", "A")]).unwrap_err();
        assert!(matches!(err, Error::SelfLoop { row: 1, .. }));
    }

    #[test]
    fn duplicate_node_rejected() {
        let nodes = vec![
            NodeRecord::new("A", NodeKind::Person),
            NodeRecord::new("A", NodeKind::CCorp),
        ];
        assert!(matches!(
            build_graph(nodes, vec![]),
            Err(Error::DuplicateNode { .. })
        ));
    }

    #[test]
    fn adjacency_is_consistent() {
        let g = indexed(5, &[(0, 1), (0, 2), (2, 1), (3, 4), (4, 3)]);
        for v in 0..g.node_count() {
            for &w in g.out_neighbors(v) {
                assert!(g.in_neighbors(w as usize).contains(&(v as u32)));
            }
            for &u in g.in_neighbors(v) {
                assert!(g.has_edge(u as usize, v));
            }
            for &id in g.in_edge_ids(v) {
                assert_eq!(g.edges()[id as usize].child, v);
            }
        }
        let und = g.undirected();
        // 3<->4 collapses to a single undirected link.
        assert_eq!(und.entry_count(), 8);
    }

    #[test]
    fn shares_reconcile_by_source_priority() {
        let (s, d) = reconcile_shares([
            (Some(0.4), EdgeSource::ParentReport),
            (Some(0.6), EdgeSource::ChildReport),
        ]);
        assert_eq!((s, d), (Some(0.6), true));
        let (s, d) = reconcile_shares([
            (Some(0.5), EdgeSource::ChildReport),
            (Some(0.5), EdgeSource::ParentReport),
        ]);
        assert_eq!((s, d), (Some(0.5), false));
        let (s, d) = reconcile_shares([(None, EdgeSource::ParentReport)]);
        assert_eq!((s, d), (None, false));
    }
}
