use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::graph::EntityGraph;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShortcutReport {
    pub count: u64,
    /// `count` over the number of edges.
    pub ratio: f64,
    /// False when a depth bound cut some search short.
    pub exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_depth: Option<u32>,
}

const NONE: u32 = u32::MAX;

struct Scratch {
    labels: Vec<[u32; 2]>,
    touched: Vec<u32>,
    frontier: Vec<u32>,
    next: Vec<u32>,
}

impl Scratch {
    fn new(n: usize) -> Scratch {
        Scratch {
            labels: vec![[NONE; 2]; n],
            touched: Vec::new(),
            frontier: Vec::new(),
            next: Vec::new(),
        }
    }

    /// Adds `label` to `v`; true if `v` gained it.
    fn offer(&mut self, v: u32, label: u32) -> bool {
        let slot = &mut self.labels[v as usize];
        if slot[0] == label || slot[1] == label {
            return false;
        }
        if slot[0] == NONE {
            slot[0] = label;
            self.touched.push(v);
            true
        } else if slot[1] == NONE {
            slot[1] = label;
            true
        } else {
            false
        }
    }

    fn reset(&mut self) {
        for &v in &self.touched {
            self.labels[v as usize] = [NONE; 2];
        }
        self.touched.clear();
        self.frontier.clear();
        self.next.clear();
    }
}

/// Positions within `out_neighbors(u)` of shortcut edges, and whether the
/// depth bound cut the search.
///
/// Walks forward from all children of `u` at once with `u` removed. Each
/// node keeps up to two distinct child labels, which is enough to tell
/// whether a child is reached from some other child.
fn probe(g: &EntityGraph, u: usize, max_depth: Option<u32>, s: &mut Scratch) -> (Vec<usize>, bool) {
    let children = g.out_neighbors(u);
    if children.len() < 2 {
        return (Vec::new(), false);
    }
    for &c in children {
        s.offer(c, c);
        s.frontier.push(c);
    }
    let resolved = |s: &Scratch, c: u32| {
        let l = s.labels[c as usize];
        (l[0] != NONE && l[0] != c) || (l[1] != NONE && l[1] != c)
    };
    let mut unresolved = children.len();
    let mut length = 1u32;
    let mut cut = false;
    while !s.frontier.is_empty() && unresolved > 0 {
        if max_depth.is_some_and(|d| length >= d) {
            cut = true;
            break;
        }
        let frontier = std::mem::take(&mut s.frontier);
        for &x in &frontier {
            let lx = s.labels[x as usize];
            for &y in g.out_neighbors(x as usize) {
                if y as usize == u {
                    continue;
                }
                let was = resolved(s, y);
                let mut gained = false;
                for l in lx {
                    if l != NONE && s.offer(y, l) {
                        gained = true;
                    }
                }
                if gained {
                    s.next.push(y);
                    if !was && children.binary_search(&y).is_ok() && resolved(s, y) {
                        unresolved -= 1;
                    }
                }
            }
        }
        s.frontier = frontier;
        s.frontier.clear();
        std::mem::swap(&mut s.frontier, &mut s.next);
        length += 1;
    }
    let hits = children
        .iter()
        .enumerate()
        .filter(|&(_, &c)| resolved(s, c))
        .map(|(i, _)| i)
        .collect();
    s.reset();
    (hits, cut)
}

/// Edges `u -> v` where `v` is also reachable from `u` by a longer path,
/// optionally only through paths of at most `max_depth` edges.
pub fn shortcut_flags(g: &EntityGraph, max_depth: Option<u32>) -> Vec<bool> {
    let mut flags = vec![false; g.edge_count()];
    let mut s = Scratch::new(g.node_count());
    for u in 0..g.node_count() {
        let start = g.out_edge_range(u).start;
        for i in probe(g, u, max_depth, &mut s).0 {
            flags[start + i] = true;
        }
    }
    flags
}

pub fn count_shortcut_edges(g: &EntityGraph) -> ShortcutReport {
    count_shortcut_edges_within(g, None)
}

pub fn count_shortcut_edges_within(g: &EntityGraph, max_depth: Option<u32>) -> ShortcutReport {
    let n = g.node_count();
    let (count, cut) = (0..n)
        .into_par_iter()
        .map_init(
            || Scratch::new(n),
            |s, u| {
                let (hits, cut) = probe(g, u, max_depth, s);
                (hits.len() as u64, cut)
            },
        )
        .reduce(|| (0, false), |a, b| (a.0 + b.0, a.1 || b.1));
    ShortcutReport {
        count,
        ratio: if g.edge_count() == 0 {
            0.0
        } else {
            count as f64 / g.edge_count() as f64
        },
        exact: !cut,
        max_depth,
    }
}
