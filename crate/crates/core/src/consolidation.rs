//! Share-weighted roll-up of entity values through ownership chains.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::EntityGraph;
use crate::motifs::nontrivial_sccs;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Assets,
    Wages,
}

/// Treatment of links without a reported share.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SharePolicy {
    /// Shareless parents split the child's unassigned fraction evenly.
    #[default]
    EqualSplit,
    /// Shareless links carry nothing.
    Skip,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Convergence {
    ExactDag,
    Iterative { residual: f64, iterations: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsolidatedMeasure {
    pub measure: Option<Measure>,
    pub policy: SharePolicy,
    /// Consolidated value per node index.
    pub values: Vec<f64>,
    pub convergence: Convergence,
    /// Children whose inbound shares add up to more than one.
    pub over_unity_children: Vec<String>,
}

const MAX_ITERATIONS: usize = 1_000_000;

/// Share used for each edge under `policy`, in edge order.
pub fn effective_shares(g: &EntityGraph, policy: SharePolicy) -> Vec<f64> {
    let edges = g.edges();
    let mut shares: Vec<f64> = edges.iter().map(|e| e.share.unwrap_or(0.0)).collect();
    if policy == SharePolicy::EqualSplit {
        for c in 0..g.node_count() {
            let ids = g.in_edge_ids(c);
            let missing = ids
                .iter()
                .filter(|&&i| edges[i as usize].share.is_none())
                .count();
            if missing == 0 {
                continue;
            }
            let known: f64 = ids.iter().filter_map(|&i| edges[i as usize].share).sum();
            let each = (1.0 - known).max(0.0) / missing as f64;
            for &i in ids {
                if edges[i as usize].share.is_none() {
                    shares[i as usize] = each;
                }
            }
        }
    }
    shares
}

fn own_values(g: &EntityGraph, measure: Measure) -> Result<Vec<f64>> {
    let pick = |n: &crate::graph::NodeRecord| match measure {
        Measure::Assets => n.assets,
        Measure::Wages => n.wages,
    };
    if g.nodes().iter().all(|n| pick(n).is_none()) {
        return Err(Error::Precondition(
            format!("no node reports {measure:?}").to_lowercase(),
        ));
    }
    Ok(g.nodes().iter().map(|n| pick(n).unwrap_or(0.0)).collect())
}

pub fn consolidate(
    g: &EntityGraph,
    measure: Measure,
    policy: SharePolicy,
) -> Result<ConsolidatedMeasure> {
    let own = own_values(g, measure)?;
    let mut out = consolidate_values(g, &own, policy)?;
    out.measure = Some(measure);
    Ok(out)
}

fn over_unity(g: &EntityGraph, shares: &[f64]) -> Vec<String> {
    (0..g.node_count())
        .filter(|&c| {
            g.in_edge_ids(c)
                .iter()
                .map(|&i| shares[i as usize])
                .sum::<f64>()
                > 1.0 + 1e-9
        })
        .map(|c| g.node(c).id.clone())
        .collect()
}

/// `C(v) = own(v) + sum over children c of s(v, c) C(c)`.
///
/// Acyclic parts are solved exactly children-first. Each strongly connected
/// block is solved by synchronous fixed-point sweeps once its outside
/// children are known.
pub fn consolidate_values(
    g: &EntityGraph,
    own: &[f64],
    policy: SharePolicy,
) -> Result<ConsolidatedMeasure> {
    assert_eq!(own.len(), g.node_count());
    let n = g.node_count();
    let shares = effective_shares(g, policy);
    let scale: f64 = own.iter().map(|x| x.abs()).sum();
    let tol = 1e-9 * scale;

    let blocks = nontrivial_sccs(n, |v| g.out_neighbors(v), |_| true);
    let mut block_of = vec![u32::MAX; n];
    for (b, members) in blocks.iter().enumerate() {
        for &v in members {
            block_of[v as usize] = b as u32;
        }
    }
    let same_block = |u: usize, v: usize| block_of[u] != u32::MAX && block_of[u] == block_of[v];

    // Children still pending per node (singleton) or per block.
    let mut pending = vec![0usize; n];
    let mut block_pending = vec![0usize; blocks.len()];
    for e in g.edges() {
        if same_block(e.parent, e.child) {
            continue;
        }
        match block_of[e.parent] {
            u32::MAX => pending[e.parent] += 1,
            b => block_pending[b as usize] += 1,
        }
    }
    let mut values = own.to_vec();
    let mut ready: Vec<usize> = (0..n)
        .filter(|&v| block_of[v] == u32::MAX && pending[v] == 0)
        .collect();
    let mut ready_blocks: Vec<usize> = (0..blocks.len())
        .filter(|&b| block_pending[b] == 0)
        .collect();
    let mut worst = 0.0f64;
    let mut total_iterations = 0;

    let mut release = |v: usize, ready: &mut Vec<usize>, ready_blocks: &mut Vec<usize>| {
        for &p in g.in_neighbors(v) {
            let p = p as usize;
            if same_block(p, v) {
                continue;
            }
            match block_of[p] {
                u32::MAX => {
                    pending[p] -= 1;
                    if pending[p] == 0 {
                        ready.push(p);
                    }
                }
                b => {
                    block_pending[b as usize] -= 1;
                    if block_pending[b as usize] == 0 {
                        ready_blocks.push(b as usize);
                    }
                }
            }
        }
    };

    let mut done = 0;
    while done < n {
        if let Some(v) = ready.pop() {
            let mut c = own[v];
            for i in g.out_edge_range(v) {
                c += shares[i] * values[g.edges()[i].child];
            }
            values[v] = c;
            done += 1;
            release(v, &mut ready, &mut ready_blocks);
        } else if let Some(b) = ready_blocks.pop() {
            let (iters, residual) = solve_block(
                g,
                &blocks[b],
                &block_of,
                b as u32,
                &shares,
                own,
                &mut values,
                tol,
            )?;
            total_iterations += iters;
            worst = worst.max(residual);
            done += blocks[b].len();
            for &v in &blocks[b] {
                release(v as usize, &mut ready, &mut ready_blocks);
            }
        } else {
            unreachable!("condensation of a digraph is acyclic");
        }
    }
    let convergence = if blocks.is_empty() {
        Convergence::ExactDag
    } else {
        Convergence::Iterative {
            residual: worst,
            iterations: total_iterations,
        }
    };
    Ok(ConsolidatedMeasure {
        measure: None,
        policy,
        values,
        convergence,
        over_unity_children: over_unity(g, &shares),
    })
}

/// Solves one strongly connected block in place; returns sweeps and final
/// residual.
#[allow(clippy::too_many_arguments)]
fn solve_block(
    g: &EntityGraph,
    members: &[u32],
    block_of: &[u32],
    id: u32,
    shares: &[f64],
    own: &[f64],
    values: &mut [f64],
    tol: f64,
) -> Result<(usize, f64)> {
    let local = |v: usize| members.binary_search(&(v as u32)).unwrap();
    // Internal links (row, column, share) and the fixed outside part.
    let mut internal = Vec::new();
    let mut base = vec![0.0; members.len()];
    for (r, &v) in members.iter().enumerate() {
        base[r] = own[v as usize];
        for i in g.out_edge_range(v as usize) {
            let c = g.edges()[i].child;
            if block_of[c] == id {
                internal.push((r, local(c), shares[i]));
            } else {
                base[r] += shares[i] * values[c];
            }
        }
    }
    check_spectral_radius(g, members, &internal)?;
    let mut x = base.clone();
    let mut next = vec![0.0; members.len()];
    for iter in 1..=MAX_ITERATIONS {
        next.copy_from_slice(&base);
        for &(r, c, s) in &internal {
            next[r] += s * x[c];
        }
        let residual: f64 = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut x, &mut next);
        if residual <= tol {
            for (r, &v) in members.iter().enumerate() {
                values[v as usize] = x[r];
            }
            return Ok((iter, residual));
        }
    }
    Err(Error::NonConvergence(format!(
        "consolidation of a {}-node ownership cycle did not settle in {MAX_ITERATIONS} sweeps",
        members.len()
    )))
}

/// Fails when the block's share matrix has spectral radius of one or more,
/// naming a heavy cycle. Uses Collatz-Wielandt bounds from power iteration
/// on `(A + I) / 2`, which keeps the iteration aperiodic.
fn check_spectral_radius(
    g: &EntityGraph,
    members: &[u32],
    internal: &[(usize, usize, f64)],
) -> Result<()> {
    let m = members.len();
    let mut y = vec![1.0; m];
    let mut ay = vec![0.0; m];
    for _ in 0..10_000 {
        ay.iter_mut().for_each(|a| *a = 0.0);
        for &(r, c, s) in internal {
            ay[r] += s * y[c];
        }
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for r in 0..m {
            let ratio = ay[r] / y[r];
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        if hi < 1.0 {
            return Ok(());
        }
        if lo >= 1.0 - 1e-12 {
            return Err(divergent_cycle(g, members, internal, &y));
        }
        let mut norm = 0.0f64;
        for r in 0..m {
            y[r] = 0.5 * (y[r] + ay[r]);
            norm = norm.max(y[r]);
        }
        y.iter_mut().for_each(|v| *v /= norm);
    }
    // Bounds still straddle one: treat as divergent only if the estimate says so.
    let estimate: f64 = {
        ay.iter_mut().for_each(|a| *a = 0.0);
        for &(r, c, s) in internal {
            ay[r] += s * y[c];
        }
        ay.iter().sum::<f64>() / y.iter().sum::<f64>()
    };
    if estimate >= 1.0 - 1e-9 {
        Err(divergent_cycle(g, members, internal, &y))
    } else {
        Ok(())
    }
}

/// Follows the heaviest weighted link from the node with the largest Perron
/// weight until a node repeats.
fn divergent_cycle(
    g: &EntityGraph,
    members: &[u32],
    internal: &[(usize, usize, f64)],
    y: &[f64],
) -> Error {
    let mut best: Vec<Option<(usize, f64)>> = vec![None; members.len()];
    for &(r, c, s) in internal {
        let w = s * y[c];
        if best[r].is_none_or(|(_, bw)| w > bw) {
            best[r] = Some((c, w));
        }
    }
    let start = (0..members.len())
        .max_by(|&a, &b| y[a].total_cmp(&y[b]))
        .unwrap_or(0);
    let mut order = vec![usize::MAX; members.len()];
    let mut path = Vec::new();
    let mut v = start;
    while order[v] == usize::MAX {
        order[v] = path.len();
        path.push(v);
        v = best[v].map_or(v, |(c, _)| c);
    }
    let cycle = &path[order[v]..];
    let share = |a: usize, b: usize| {
        internal
            .iter()
            .find(|&&(r, c, _)| r == a && c == b)
            .map_or(0.0, |t| t.2)
    };
    let product: f64 = (0..cycle.len())
        .map(|i| share(cycle[i], cycle[(i + 1) % cycle.len()]))
        .product();
    // Start the listing at the smallest id for a stable message.
    let ids: Vec<String> = cycle
        .iter()
        .map(|&r| g.node(members[r] as usize).id.clone())
        .collect();
    let first = (0..ids.len())
        .min_by(|&a, &b| ids[a].cmp(&ids[b]))
        .unwrap_or(0);
    let cycle = ids[first..].iter().chain(&ids[..first]).cloned().collect();
    Error::Divergent { cycle, product }
}

/// Whole-graph synchronous sweeps from `own`, without any ordering. Kept as
/// an independent check on [`consolidate_values`].
pub fn consolidate_iterative(
    g: &EntityGraph,
    own: &[f64],
    policy: SharePolicy,
) -> Result<ConsolidatedMeasure> {
    let shares = effective_shares(g, policy);
    let tol = 1e-9 * own.iter().map(|x| x.abs()).sum::<f64>();
    let mut x = own.to_vec();
    let mut next = vec![0.0; own.len()];
    for iter in 1..=MAX_ITERATIONS {
        next.copy_from_slice(own);
        for (i, e) in g.edges().iter().enumerate() {
            next[e.parent] += shares[i] * x[e.child];
        }
        let residual: f64 = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut x, &mut next);
        if residual <= tol {
            return Ok(ConsolidatedMeasure {
                measure: None,
                policy,
                values: x,
                convergence: Convergence::Iterative {
                    residual,
                    iterations: iter,
                },
                over_unity_children: over_unity(g, &shares),
            });
        }
        if !residual.is_finite() {
            break;
        }
    }
    Err(Error::NonConvergence(
        "whole-graph consolidation sweeps did not settle".into(),
    ))
}
