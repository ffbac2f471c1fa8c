//! Undirected distance statistics, clustering and degree assortativity.

use std::sync::atomic::{AtomicU32, Ordering};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::components::connected_components;
use crate::error::{Error, Result};
use crate::graph::{Adjacency, EntityGraph};
use crate::seed;

pub const DEFAULT_EXACT_CAP: usize = 200_000;
pub const DEFAULT_SAMPLE_SOURCES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum PathMode {
    /// Breadth-first search from every node.
    Exact,
    /// Search from `sources` seeded random nodes.
    Sampled { sources: usize, seed: u64 },
    /// Exact up to `exact_cap` nodes, sampled above.
    Auto {
        exact_cap: usize,
        sources: usize,
        seed: u64,
    },
}

impl Default for PathMode {
    fn default() -> Self {
        PathMode::Auto {
            exact_cap: DEFAULT_EXACT_CAP,
            sources: DEFAULT_SAMPLE_SOURCES,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathStats {
    /// Exact diameter, or a lower bound when `exact` is false.
    pub diameter: u32,
    pub mean_path: f64,
    /// Upper median of the pair distances.
    pub median_path: u32,
    pub exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampled_sources: Option<usize>,
    /// Ordered source-target pairs behind the mean and median.
    pub pairs: u64,
}

/// Distance histogram from one source; returns the farthest node (smallest
/// index on ties).
fn bfs(
    adj: &Adjacency,
    source: usize,
    dist: &mut [u32],
    queue: &mut Vec<u32>,
    hist: &mut Vec<u64>,
) -> (u32, usize) {
    dist.fill(u32::MAX);
    queue.clear();
    dist[source] = 0;
    queue.push(source as u32);
    let mut head = 0;
    let (mut far, mut far_node) = (0u32, source);
    while head < queue.len() {
        let v = queue[head] as usize;
        head += 1;
        let d = dist[v];
        if d > far || (d == far && v < far_node) {
            far = d;
            far_node = v;
        }
        if d > 0 {
            if hist.len() <= d as usize {
                hist.resize(d as usize + 1, 0);
            }
            hist[d as usize] += 1;
        }
        for &w in adj.neighbors(v) {
            if dist[w as usize] == u32::MAX {
                dist[w as usize] = d + 1;
                queue.push(w);
            }
        }
    }
    (far, far_node)
}

fn sweep(adj: &Adjacency, sources: &[usize]) -> (Vec<u64>, u32) {
    let n = adj.node_count();
    sources
        .par_iter()
        .map_init(
            || (vec![0u32; n], Vec::with_capacity(n)),
            |(dist, queue), &s| {
                let mut hist = Vec::new();
                let (ecc, _) = bfs(adj, s, dist, queue, &mut hist);
                (hist, ecc)
            },
        )
        .reduce(
            || (Vec::new(), 0),
            |(mut a, ea), (b, eb)| {
                if a.len() < b.len() {
                    a.resize(b.len(), 0);
                }
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                (a, ea.max(eb))
            },
        )
}

fn summarize(hist: &[u64]) -> (f64, u32, u64) {
    let pairs: u64 = hist.iter().sum();
    let total: f64 = hist
        .iter()
        .enumerate()
        .map(|(d, &c)| d as f64 * c as f64)
        .sum();
    // Element `pairs / 2` of the sorted distances.
    let mut seen = 0;
    let mut median = 0;
    for (d, &c) in hist.iter().enumerate() {
        seen += c;
        if seen > pairs / 2 {
            median = d as u32;
            break;
        }
    }
    (total / pairs as f64, median, pairs)
}

/// Shortest-path statistics on the undirected view of a connected graph.
pub fn path_stats(g: &EntityGraph, mode: PathMode) -> Result<PathStats> {
    let n = g.node_count();
    if n < 2 {
        return Err(Error::Precondition(
            "path statistics need at least two nodes".into(),
        ));
    }
    let cc = connected_components(g);
    if cc.component_count() > 1 {
        return Err(Error::Disconnected {
            components: cc.component_count(),
        });
    }
    let adj = g.undirected();
    let sampled = match mode {
        PathMode::Exact => None,
        PathMode::Sampled { sources, seed } => Some((sources, seed)),
        PathMode::Auto {
            exact_cap,
            sources,
            seed,
        } => (n > exact_cap).then_some((sources, seed)),
    };
    match sampled {
        Some((k, seed_value)) if k < n => {
            if k == 0 {
                return Err(Error::Precondition(
                    "sampled paths need at least one source".into(),
                ));
            }
            let mut rng =
                ChaCha8Rng::seed_from_u64(seed::derive(seed_value, seed::stream::PATH_SOURCES, 0));
            let mut sources = rand::seq::index::sample(&mut rng, n, k).into_vec();
            sources.sort_unstable();
            let (hist, ecc) = sweep(adj, &sources);
            // Double sweep: the far end of one search seeds another.
            let mut dist = vec![0u32; n];
            let mut queue = Vec::with_capacity(n);
            let mut scratch = Vec::new();
            let (_, far) = bfs(adj, sources[0], &mut dist, &mut queue, &mut scratch);
            let (ecc_far, _) = bfs(adj, far, &mut dist, &mut queue, &mut scratch);
            let (mean_path, median_path, pairs) = summarize(&hist);
            Ok(PathStats {
                diameter: ecc.max(ecc_far),
                mean_path,
                median_path,
                exact: false,
                sampled_sources: Some(k),
                pairs,
            })
        }
        _ => {
            let sources: Vec<usize> = (0..n).collect();
            let (hist, diameter) = sweep(adj, &sources);
            let (mean_path, median_path, pairs) = summarize(&hist);
            Ok(PathStats {
                diameter,
                mean_path,
                median_path,
                exact: true,
                sampled_sources: None,
                pairs,
            })
        }
    }
}

/// Diameter a random graph of `n` nodes would be expected to have.
pub fn expected_small_world_diameter(n: u64) -> Result<f64> {
    if n < 16 {
        return Err(Error::Domain(format!(
            "expected diameter needs n >= 16, got {n}"
        )));
    }
    let ln = (n as f64).ln();
    Ok(ln / ln.ln())
}

/// Triangles through each node of an undirected adjacency.
pub(crate) fn local_triangles(adj: &Adjacency) -> Vec<u32> {
    let n = adj.node_count();
    let rank = |v: u32| (adj.degree(v as usize), v);
    let forward: Vec<Vec<u32>> = (0..n as u32)
        .into_par_iter()
        .map(|u| {
            adj.neighbors(u as usize)
                .iter()
                .copied()
                .filter(|&w| rank(u) < rank(w))
                .collect()
        })
        .collect();
    let counts: Vec<AtomicU32> = (0..n).map(|_| AtomicU32::new(0)).collect();
    (0..n).into_par_iter().for_each(|u| {
        let fu = &forward[u];
        for &v in fu {
            let fv = &forward[v as usize];
            let (mut a, mut b) = (0, 0);
            while a < fu.len() && b < fv.len() {
                match fu[a].cmp(&fv[b]) {
                    std::cmp::Ordering::Less => a += 1,
                    std::cmp::Ordering::Greater => b += 1,
                    std::cmp::Ordering::Equal => {
                        for x in [u as u32, v, fu[a]] {
                            counts[x as usize].fetch_add(1, Ordering::Relaxed);
                        }
                        a += 1;
                        b += 1;
                    }
                }
            }
        }
    });
    counts.into_iter().map(AtomicU32::into_inner).collect()
}

/// Mean local clustering on the undirected view. Nodes with fewer than two
/// neighbours count as zero.
pub fn avg_clustering(g: &EntityGraph) -> f64 {
    let n = g.node_count();
    if n == 0 {
        return 0.0;
    }
    let adj = g.undirected();
    let tri = local_triangles(adj);
    let total: f64 = (0..n)
        .map(|v| {
            let d = adj.degree(v) as f64;
            if d < 2.0 {
                0.0
            } else {
                2.0 * tri[v] as f64 / (d * (d - 1.0))
            }
        })
        .sum();
    total / n as f64
}

/// Pearson correlation of undirected endpoint degrees over all links, each
/// link read in both orientations. `None` when degrees do not vary.
pub fn degree_assortativity(g: &EntityGraph) -> Result<Option<f64>> {
    let adj = g.undirected();
    let rows = adj.entry_count();
    if rows < 4 {
        return Err(Error::Precondition(
            "assortativity needs at least two links".into(),
        ));
    }
    let d = |v: usize| adj.degree(v) as f64;
    // Every ordered (v, w) is one row; both marginals are the same.
    let n = g.node_count();
    let mean = (0..n).map(|v| d(v) * d(v)).sum::<f64>() / rows as f64;
    let (mut cov, mut var) = (0.0, 0.0);
    for v in 0..n {
        let dv = d(v) - mean;
        var += adj.degree(v) as f64 * dv * dv;
        for &w in adj.neighbors(v) {
            cov += dv * (d(w as usize) - mean);
        }
    }
    if var <= 1e-12 * rows as f64 * mean * mean {
        return Ok(None);
    }
    Ok(Some((cov / var).clamp(-1.0, 1.0)))
}
