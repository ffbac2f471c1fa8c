//! Canonical forms of small directed graphs.
//!
//! A `k`-node digraph is an adjacency mask with one bit per ordered pair
//! `(i, j)`, `i != j`. The canonical form of a class is the smallest mask over
//! all relabelings.

use std::sync::OnceLock;

#[inline]
pub fn bit(k: usize, i: usize, j: usize) -> usize {
    i * (k - 1) + if j < i { j } else { j - 1 }
}

/// Adjacency mask of the subgraph induced by `nodes`.
pub fn mask_of(nodes: &[u32], has_edge: impl Fn(u32, u32) -> bool) -> u16 {
    let k = nodes.len();
    let mut mask = 0u16;
    for i in 0..k {
        for j in 0..k {
            if i != j && has_edge(nodes[i], nodes[j]) {
                mask |= 1 << bit(k, i, j);
            }
        }
    }
    mask
}

pub fn mask_from_edges(k: usize, edges: &[(usize, usize)]) -> u16 {
    edges.iter().fold(0, |m, &(i, j)| m | 1 << bit(k, i, j))
}

pub fn edges_of(k: usize, mask: u16) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..k {
        for j in 0..k {
            if i != j && mask & (1 << bit(k, i, j)) != 0 {
                out.push((i, j));
            }
        }
    }
    out
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..k {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

fn build_table(k: usize) -> Vec<u16> {
    let perms = permutations(k);
    let size = 1usize << (k * (k - 1));
    (0..size)
        .map(|mask| {
            let edges = edges_of(k, mask as u16);
            perms
                .iter()
                .map(|p| {
                    edges
                        .iter()
                        .fold(0u16, |m, &(i, j)| m | 1 << bit(k, p[i], p[j]))
                })
                .min()
                .unwrap()
        })
        .collect()
}

fn table(k: usize) -> &'static [u16] {
    static T3: OnceLock<Vec<u16>> = OnceLock::new();
    static T4: OnceLock<Vec<u16>> = OnceLock::new();
    match k {
        3 => T3.get_or_init(|| build_table(3)),
        4 => T4.get_or_init(|| build_table(4)),
        _ => panic!("canonical tables exist for k = 3 and 4 only"),
    }
}

#[inline]
pub fn canonical(k: usize, mask: u16) -> u16 {
    table(k)[mask as usize]
}

/// True when the mask is weakly connected.
pub fn is_connected(k: usize, mask: u16) -> bool {
    let mut seen = 1u32;
    let mut frontier = 1u32;
    while frontier != 0 {
        let i = frontier.trailing_zeros() as usize;
        frontier &= !(1 << i);
        for j in 0..k {
            if j != i && seen & (1 << j) == 0 && mask & (1 << bit(k, i, j) | 1 << bit(k, j, i)) != 0
            {
                seen |= 1 << j;
                frontier |= 1 << j;
            }
        }
    }
    seen == (1 << k) - 1
}

/// Connected triad classes with representative edges on nodes a=0, b=1, c=2.
const TRIADS: [(&str, &[(usize, usize)]); 13] = [
    ("021D", &[(1, 0), (1, 2)]),
    ("021U", &[(0, 1), (2, 1)]),
    ("021C", &[(0, 1), (1, 2)]),
    ("111D", &[(0, 2), (2, 0), (1, 2)]),
    ("111U", &[(0, 2), (2, 0), (2, 1)]),
    ("030T", &[(0, 1), (2, 1), (0, 2)]),
    ("030C", &[(1, 0), (2, 1), (0, 2)]),
    ("201", &[(0, 1), (1, 0), (0, 2), (2, 0)]),
    ("120D", &[(1, 2), (1, 0), (0, 2), (2, 0)]),
    ("120U", &[(0, 1), (2, 1), (0, 2), (2, 0)]),
    ("120C", &[(0, 1), (1, 2), (0, 2), (2, 0)]),
    ("210", &[(0, 1), (1, 2), (2, 1), (0, 2), (2, 0)]),
    ("300", &[(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)]),
];

/// Canonical mask of a named triad class.
pub fn triad_class(label: &str) -> Option<u16> {
    TRIADS
        .iter()
        .find(|(l, _)| *l == label)
        .map(|(_, e)| canonical(3, mask_from_edges(3, e)))
}

fn triad_label(canon: u16) -> &'static str {
    static LABELS: OnceLock<Vec<&'static str>> = OnceLock::new();
    let labels = LABELS.get_or_init(|| {
        let mut v = vec![""; 64];
        for (label, edges) in TRIADS {
            v[canonical(3, mask_from_edges(3, edges)) as usize] = label;
        }
        v
    });
    labels[canon as usize]
}

/// MAN code for triads, three hex digits of the canonical mask for 4-node
/// classes.
pub fn class_label(k: usize, canon: u16) -> String {
    match k {
        3 => {
            let l = triad_label(canon);
            assert!(!l.is_empty(), "mask {canon} is not a connected triad class");
            l.to_string()
        }
        _ => format!("{canon:03x}"),
    }
}

/// Three parents owning one child.
pub fn funnel_class() -> u16 {
    canonical(4, mask_from_edges(4, &[(0, 3), (1, 3), (2, 3)]))
}

/// One parent owning three children.
pub fn fan_out_class() -> u16 {
    canonical(4, mask_from_edges(4, &[(0, 1), (0, 2), (0, 3)]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn class_counts() {
        // 16 triad classes and 218 four-node classes, of which 13 and 199
        // are weakly connected.
        for (k, all, connected) in [(3, 16, 13), (4, 218, 199)] {
            let classes: BTreeSet<u16> = table(k).iter().copied().collect();
            assert_eq!(classes.len(), all);
            assert_eq!(
                classes.iter().filter(|&&c| is_connected(k, c)).count(),
                connected
            );
        }
    }

    #[test]
    fn canonical_is_idempotent_and_minimal() {
        for k in [3, 4] {
            for (m, &c) in table(k).iter().enumerate() {
                assert!(c as usize <= m);
                assert_eq!(canonical(k, c), c);
            }
        }
    }

    #[test]
    fn triad_labels_are_distinct_classes() {
        let classes: BTreeSet<u16> = TRIADS
            .iter()
            .map(|(l, _)| triad_class(l).unwrap())
            .collect();
        assert_eq!(classes.len(), 13);
        for c in classes {
            assert!(is_connected(3, c));
        }
    }

    #[test]
    fn man_codes_count_dyads() {
        // M, A, N digits agree with the edge lists.
        for (label, edges) in TRIADS {
            let m = edges
                .iter()
                .filter(|&&(i, j)| edges.contains(&(j, i)))
                .count()
                / 2;
            let a = edges.len() - 2 * m;
            let n = 3 - m - a;
            assert_eq!(&label[..3], format!("{m}{a}{n}"));
        }
    }

    #[test]
    fn funnel_and_fan_out_differ() {
        assert_ne!(funnel_class(), fan_out_class());
        assert_eq!(class_label(4, funnel_class()).len(), 3);
    }
}
