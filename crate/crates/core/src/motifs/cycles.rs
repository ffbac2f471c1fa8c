use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::EntityGraph;

pub const DEFAULT_CYCLE_CAP: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleReport {
    pub cycle_count: u64,
    /// Counting stopped at the cap; the true count is larger.
    pub truncated: bool,
}

/// Strongly connected components with at least two nodes, over the nodes
/// where `alive` holds. Iterative Tarjan.
pub(crate) fn nontrivial_sccs<'a>(
    n: usize,
    succ: impl Fn(usize) -> &'a [u32],
    alive: impl Fn(usize) -> bool,
) -> Vec<Vec<u32>> {
    const UNSEEN: u32 = u32::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut call: Vec<(u32, usize)> = Vec::new();
    let mut next = 0u32;
    let mut out = Vec::new();
    for root in 0..n {
        if index[root] != UNSEEN || !alive(root) {
            continue;
        }
        call.push((root as u32, 0));
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root as u32);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            let v = v as usize;
            let nbrs = succ(v);
            if *pos < nbrs.len() {
                let w = nbrs[*pos] as usize;
                *pos += 1;
                if !alive(w) {
                    continue;
                }
                if index[w] == UNSEEN {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w as u32);
                    on_stack[w] = true;
                    call.push((w as u32, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent as usize] = low[parent as usize].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w as usize] = false;
                    comp.push(w);
                    if w as usize == v {
                        break;
                    }
                }
                if comp.len() > 1 {
                    comp.sort_unstable();
                    out.push(comp);
                }
            }
        }
    }
    out
}

/// Counts simple directed cycles with Johnson's algorithm, one strongly
/// connected component at a time, stopping once `cap` is reached.
pub fn count_simple_cycles(g: &EntityGraph, cap: u64) -> Result<CycleReport> {
    if cap == 0 {
        return Err(Error::Precondition("cycle cap must be at least 1".into()));
    }
    let mut count = 0u64;
    for comp in nontrivial_sccs(g.node_count(), |v| g.out_neighbors(v), |_| true) {
        let adj: Vec<Vec<u32>> = comp
            .iter()
            .map(|&v| {
                g.out_neighbors(v as usize)
                    .iter()
                    .filter_map(|w| comp.binary_search(w).ok().map(|i| i as u32))
                    .collect()
            })
            .collect();
        if johnson(&adj, cap, &mut count) {
            return Ok(CycleReport {
                cycle_count: cap,
                truncated: true,
            });
        }
    }
    Ok(CycleReport {
        cycle_count: count,
        truncated: false,
    })
}

/// Restricts `adj` to `keep` (sorted) with fresh local ids.
fn relabel(adj: &[Vec<u32>], keep: &[u32]) -> Vec<Vec<u32>> {
    keep.iter()
        .map(|&v| {
            adj[v as usize]
                .iter()
                .filter_map(|w| keep.binary_search(w).ok().map(|i| i as u32))
                .collect()
        })
        .collect()
}

/// Counts cycles of one strongly connected component into `count`. Returns
/// true when a cycle beyond `cap` was found.
fn johnson(adj: &[Vec<u32>], cap: u64, count: &mut u64) -> bool {
    let mut work = vec![adj.to_vec()];
    while let Some(adj) = work.pop() {
        let n = adj.len();
        let mut blocked = vec![false; n];
        let mut closed = vec![false; n];
        let mut b: Vec<Vec<u32>> = vec![Vec::new(); n];
        // Cycles through node 0, then node 0 is dropped.
        let mut path = vec![0u32];
        let mut stack: Vec<(u32, usize)> = vec![(0, 0)];
        blocked[0] = true;
        while let Some(&mut (v, ref mut pos)) = stack.last_mut() {
            let v = v as usize;
            if *pos < adj[v].len() {
                let w = adj[v][*pos] as usize;
                *pos += 1;
                if w == 0 {
                    *count += 1;
                    if *count > cap {
                        return true;
                    }
                    for &p in &path {
                        closed[p as usize] = true;
                    }
                } else if !blocked[w] {
                    path.push(w as u32);
                    stack.push((w as u32, 0));
                    closed[w] = false;
                    blocked[w] = true;
                }
                continue;
            }
            if closed[v] {
                unblock(v, &mut blocked, &mut b);
            } else {
                for &w in &adj[v] {
                    if !b[w as usize].contains(&(v as u32)) {
                        b[w as usize].push(v as u32);
                    }
                }
            }
            stack.pop();
            path.pop();
        }
        for comp in nontrivial_sccs(n, |v| &adj[v], |v| v != 0) {
            work.push(relabel(&adj, &comp));
        }
    }
    false
}

fn unblock(v: usize, blocked: &mut [bool], b: &mut [Vec<u32>]) {
    let mut stack = vec![v as u32];
    while let Some(u) = stack.pop() {
        let u = u as usize;
        if blocked[u] {
            blocked[u] = false;
            stack.append(&mut b[u]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::test_util::indexed;
    use crate::synth::{gen_er_digraph, gen_random_tree};

    /// Counts cycles by extending simple paths from their smallest node.
    fn brute_force(g: &EntityGraph) -> u64 {
        fn walk(g: &EntityGraph, start: usize, v: usize, on_path: &mut Vec<bool>) -> u64 {
            let mut c = 0;
            for &w in g.out_neighbors(v) {
                let w = w as usize;
                if w == start {
                    c += 1;
                } else if w > start && !on_path[w] {
                    on_path[w] = true;
                    c += walk(g, start, w, on_path);
                    on_path[w] = false;
                }
            }
            c
        }
        let mut on_path = vec![false; g.node_count()];
        (0..g.node_count())
            .map(|s| walk(g, s, s, &mut on_path))
            .sum()
    }

    fn complete(n: usize) -> EntityGraph {
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
            .collect();
        indexed(n, &edges)
    }

    #[test]
    fn hand_cases() {
        let dag = indexed(4, &[(0, 1), (1, 2), (0, 2), (2, 3)]);
        assert_eq!(
            count_simple_cycles(&dag, 10).unwrap(),
            CycleReport {
                cycle_count: 0,
                truncated: false
            }
        );
        let two = indexed(2, &[(0, 1), (1, 0)]);
        assert_eq!(count_simple_cycles(&two, 10).unwrap().cycle_count, 1);
        assert_eq!(
            count_simple_cycles(&complete(4), 100).unwrap().cycle_count,
            20
        );
    }

    #[test]
    fn cap_truncates() {
        let r = count_simple_cycles(&complete(5), 10).unwrap();
        assert_eq!(
            r,
            CycleReport {
                cycle_count: 10,
                truncated: true
            }
        );
        // 84 cycles on K5; a cap of exactly 84 is not truncation.
        assert_eq!(
            count_simple_cycles(&complete(5), 84).unwrap(),
            CycleReport {
                cycle_count: 84,
                truncated: false
            }
        );
        assert!(count_simple_cycles(&complete(3), 0).is_err());
    }

    #[test]
    fn matches_brute_force() {
        for seed in 0..20 {
            let g = gen_er_digraph(9, 0.1 + 0.02 * seed as f64, seed).unwrap();
            assert_eq!(
                count_simple_cycles(&g, u64::MAX).unwrap().cycle_count,
                brute_force(&g),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn trees_are_acyclic() {
        let t = gen_random_tree(1000, 7).unwrap();
        assert_eq!(count_simple_cycles(&t, 1).unwrap().cycle_count, 0);
    }

    #[test]
    fn sccs_found() {
        let g = indexed(6, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 3)]);
        let mut s = nontrivial_sccs(6, |v| g.out_neighbors(v), |_| true);
        s.sort();
        assert_eq!(s, vec![vec![0, 1, 2], vec![3, 4]]);
    }
}
