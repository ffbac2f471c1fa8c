//! Connected-subgraph enumeration (ESU) and its sampling variant.
//!
//! Each connected `k`-subset is reached exactly once, from its smallest node.
//! When `select(depth)` rejects a branch the whole subtree is skipped, so a
//! subset survives with the product of the per-depth acceptance rates.

use std::ops::ControlFlow;

use crate::graph::Adjacency;

pub(crate) fn esu_root(
    adj: &Adjacency,
    k: usize,
    root: u32,
    select: &mut impl FnMut(usize) -> bool,
    visit: &mut impl FnMut(&[u32]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let mut sub = Vec::with_capacity(k);
    sub.push(root);
    if k == 1 {
        return visit(&sub);
    }
    let ext: Vec<u32> = adj
        .neighbors(root as usize)
        .iter()
        .copied()
        .filter(|&u| u > root)
        .collect();
    extend(adj, k, root, &mut sub, ext, select, visit)
}

fn extend(
    adj: &Adjacency,
    k: usize,
    root: u32,
    sub: &mut Vec<u32>,
    mut ext: Vec<u32>,
    select: &mut impl FnMut(usize) -> bool,
    visit: &mut impl FnMut(&[u32]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let depth = sub.len() + 1;
    if depth == k {
        for &w in &ext {
            if select(depth) {
                sub.push(w);
                let flow = visit(sub);
                sub.pop();
                flow?;
            }
        }
        return ControlFlow::Continue(());
    }
    while let Some(w) = ext.pop() {
        if !select(depth) {
            continue;
        }
        let mut next = ext.clone();
        for &u in adj.neighbors(w as usize) {
            // Exclusive neighbours: not in the subgraph nor next to it.
            if u > root
                && !sub.contains(&u)
                && !sub.iter().any(|&s| adj.contains(s as usize, u as usize))
            {
                next.push(u);
            }
        }
        sub.push(w);
        let flow = extend(adj, k, root, sub, next, select, visit);
        sub.pop();
        flow?;
    }
    ControlFlow::Continue(())
}
