//! CSV ingest, duplicate-report reconciliation and network scoping.
//!
//! Node files carry the header `id,kind,naics,assets,wages`; edge files carry
//! `parent_id,child_id,share_pct,source` with the share in percent of the
//! child. Row numbers in errors count data rows from 1 (the header is row 0).

use std::collections::{BTreeSet, HashSet};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::components;
use crate::error::{Error, Result};
use crate::graph::{reconcile_shares, EdgeRecord, EdgeSource, EntityGraph, NodeKind, NodeRecord};

/// Shares above this many percent are treated as corrupt rows.
pub const MAX_SHARE_PCT: f64 = 200.0;

#[derive(Debug, Clone, Default)]
pub struct ParsedNodes {
    pub nodes: Vec<NodeRecord>,
    /// Rows whose kind was not recognised and was mapped to `other`.
    pub unknown_kinds: usize,
}

#[derive(Debug, Clone, Default)]
pub struct ParsedEdges {
    pub edges: Vec<EdgeRecord>,
    /// Rows reporting more than 100% ownership (kept, but flagged).
    pub over_unity_shares: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DedupedEdges {
    pub edges: Vec<EdgeRecord>,
    /// Pairs whose reported shares disagreed.
    pub discrepancies: usize,
}

struct Columns {
    idx: Vec<usize>,
}

impl Columns {
    fn resolve(headers: &csv::StringRecord, names: &[&'static str]) -> Result<Columns> {
        let idx = names
            .iter()
            .map(|name| {
                headers
                    .iter()
                    .position(|h| h.trim().eq_ignore_ascii_case(name))
                    .ok_or_else(|| Error::InvalidField {
                        row: 0,
                        field: "header",
                        message: format!("missing column `{name}`"),
                    })
            })
            .collect::<Result<_>>()?;
        Ok(Columns { idx })
    }

    fn get<'r>(&self, record: &'r csv::StringRecord, col: usize) -> &'r str {
        record.get(self.idx[col]).unwrap_or("").trim()
    }
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(input)
}

fn csv_err(e: csv::Error) -> Error {
    let row = e
        .position()
        .map(|p| p.line().saturating_sub(1))
        .unwrap_or(0);
    Error::Csv { row, source: e }
}

fn parse_amount(raw: &str, row: u64, field: &'static str) -> Result<Option<f64>> {
    if raw.is_empty() {
        return Ok(None);
    }
    let v: f64 = raw.parse().map_err(|_| Error::InvalidField {
        row,
        field,
        message: format!("`{raw}` is not a number"),
    })?;
    if !v.is_finite() || v < 0.0 {
        return Err(Error::InvalidField {
            row,
            field,
            message: format!("{raw} is not a finite nonnegative amount"),
        });
    }
    Ok(Some(v))
}

pub fn parse_nodes_csv<R: Read>(input: R) -> Result<ParsedNodes> {
    let mut rdr = reader(input);
    let cols = Columns::resolve(
        rdr.headers().map_err(csv_err)?,
        &["id", "kind", "naics", "assets", "wages"],
    )?;
    let mut out = ParsedNodes::default();
    let mut seen = HashSet::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let row = i as u64 + 1;
        let id = cols.get(&record, 0);
        if id.is_empty() {
            return Err(Error::InvalidField {
                row,
                field: "id",
                message: "empty id".into(),
            });
        }
        if !seen.insert(id.to_owned()) {
            return Err(Error::DuplicateNode {
                row,
                id: id.to_owned(),
            });
        }
        let kind = cols.get(&record, 1).parse().unwrap_or_else(|_| {
            out.unknown_kinds += 1;
            NodeKind::Other
        });
        let naics = match cols.get(&record, 2) {
            "" => None,
            code => Some(code.to_owned()),
        };
        let node = NodeRecord {
            id: id.to_owned(),
            kind,
            naics,
            assets: parse_amount(cols.get(&record, 3), row, "assets")?,
            wages: parse_amount(cols.get(&record, 4), row, "wages")?,
        };
        node.validate(row)?;
        out.nodes.push(node);
    }
    Ok(out)
}

pub fn parse_edges_csv<R: Read>(input: R) -> Result<ParsedEdges> {
    let mut rdr = reader(input);
    let cols = Columns::resolve(
        rdr.headers().map_err(csv_err)?,
        &["parent_id", "child_id", "share_pct", "source"],
    )?;
    let mut out = ParsedEdges::default();
    for (i, record) in rdr.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let row = i as u64 + 1;
        let parent = cols.get(&record, 0);
        let child = cols.get(&record, 1);
        for (field, id) in [("parent_id", parent), ("child_id", child)] {
            if id.is_empty() {
                return Err(Error::InvalidField {
                    row,
                    field,
                    message: "empty id".into(),
                });
            }
        }
        if parent == child {
            return Err(Error::SelfLoop {
                row,
                id: parent.to_owned(),
            });
        }
        let share = match cols.get(&record, 2) {
            "" => None,
            raw => {
                let pct: f64 = raw.parse().map_err(|_| Error::InvalidField {
                    row,
                    field: "share_pct",
                    message: format!("`{raw}` is not a number"),
                })?;
                if !(pct > 0.0 && pct <= MAX_SHARE_PCT) {
                    return Err(Error::InvalidField {
                        row,
                        field: "share_pct",
                        message: format!("{raw} outside (0, {MAX_SHARE_PCT}]"),
                    });
                }
                if pct > 100.0 {
                    out.over_unity_shares += 1;
                }
                Some(pct / 100.0)
            }
        };
        let raw_source = cols.get(&record, 3);
        let source = raw_source.parse().map_err(|_| Error::InvalidField {
            row,
            field: "source",
            message: format!("unknown source `{raw_source}`"),
        })?;
        out.edges.push(EdgeRecord {
            parent_id: parent.to_owned(),
            child_id: child.to_owned(),
            share,
            source,
        });
    }
    Ok(out)
}

/// Collapses redundant reports of the same `(parent, child)` link.
///
/// Output is sorted by `(parent_id, child_id)` and every record is marked
/// `merged`.
pub fn dedupe_edges(mut edges: Vec<EdgeRecord>) -> DedupedEdges {
    edges.sort_by(|a, b| (&a.parent_id, &a.child_id).cmp(&(&b.parent_id, &b.child_id)));
    let mut out = DedupedEdges::default();
    let mut start = 0;
    while start < edges.len() {
        let mut end = start + 1;
        while end < edges.len()
            && edges[end].parent_id == edges[start].parent_id
            && edges[end].child_id == edges[start].child_id
        {
            end += 1;
        }
        let (share, discrepant) =
            reconcile_shares(edges[start..end].iter().map(|e| (e.share, e.source)));
        out.discrepancies += usize::from(discrepant);
        out.edges.push(EdgeRecord {
            parent_id: edges[start].parent_id.clone(),
            child_id: edges[start].child_id.clone(),
            share,
            source: EdgeSource::Merged,
        });
        start = end;
    }
    out
}

/// Which part of the network is measured.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkScope {
    pub include_kinds: BTreeSet<NodeKind>,
    /// Drop finance/insurance/real-estate nodes (NAICS sectors 52 and 53).
    pub exclude_fire: bool,
    pub gcc_only: bool,
}

impl NetworkScope {
    /// Business entities only: every kind except people.
    pub fn entities() -> Self {
        NetworkScope {
            include_kinds: NodeKind::ALL
                .into_iter()
                .filter(|k| *k != NodeKind::Person)
                .collect(),
            exclude_fire: false,
            gcc_only: false,
        }
    }

    /// Entities plus their human owners.
    pub fn all() -> Self {
        NetworkScope {
            include_kinds: NodeKind::ALL.into_iter().collect(),
            exclude_fire: false,
            gcc_only: false,
        }
    }

    /// Entities without FIRE-sector nodes.
    pub fn no_fire() -> Self {
        NetworkScope {
            exclude_fire: true,
            ..NetworkScope::entities()
        }
    }

    /// Parses the CLI scope names `entities`, `all` and `no-fire`.
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "entities" => Some(Self::entities()),
            "all" => Some(Self::all()),
            "no-fire" | "no_fire" => Some(Self::no_fire()),
            _ => None,
        }
    }

    pub fn with_gcc_only(mut self, gcc_only: bool) -> Self {
        self.gcc_only = gcc_only;
        self
    }
}

pub fn is_fire(node: &NodeRecord) -> bool {
    matches!(node.sector(), Some("52") | Some("53"))
}

fn drop_isolated(g: &EntityGraph) -> EntityGraph {
    let keep: Vec<bool> = (0..g.node_count())
        .map(|v| g.out_degree(v) + g.in_degree(v) > 0)
        .collect();
    if keep.iter().all(|&k| k) {
        g.clone()
    } else {
        g.induced_subgraph(&keep)
    }
}

/// Restricts the network to a scope. Nodes left without any edge are dropped.
pub fn filter_network(g: &EntityGraph, scope: &NetworkScope) -> Result<EntityGraph> {
    if scope.include_kinds.is_empty() {
        return Err(Error::Precondition("scope includes no node kinds".into()));
    }
    let keep: Vec<bool> = g
        .nodes()
        .iter()
        .map(|n| scope.include_kinds.contains(&n.kind) && !(scope.exclude_fire && is_fire(n)))
        .collect();
    let mut out = drop_isolated(&g.induced_subgraph(&keep));
    if out.edge_count() == 0 {
        return Err(Error::EmptyNetwork(
            "no edges survive the scope filter".into(),
        ));
    }
    if scope.gcc_only {
        out = components::extract_gcc(&out)?.graph;
    }
    Ok(out)
}

pub fn write_nodes_csv<W: Write>(out: W, nodes: &[NodeRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["id", "kind", "naics", "assets", "wages"])
        .map_err(csv_err)?;
    for n in nodes {
        let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        w.write_record([
            n.id.as_str(),
            n.kind.as_str(),
            n.naics.as_deref().unwrap_or(""),
            &fmt(n.assets),
            &fmt(n.wages),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_edges_csv<W: Write>(out: W, edges: &[EdgeRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["parent_id", "child_id", "share_pct", "source"])
        .map_err(csv_err)?;
    for e in edges {
        let pct = e.share.map(|s| (s * 100.0).to_string()).unwrap_or_default();
        w.write_record([
            e.parent_id.as_str(),
            e.child_id.as_str(),
            &pct,
            e.source.as_str(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
