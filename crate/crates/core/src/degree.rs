//! Degree samples, empirical CCDFs and the firm-size correlation matrix.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Direction, EntityGraph};
use crate::stats;

/// Multiset of positive link counts (or any positive integer sample).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeSample {
    pub values: Vec<u64>,
    pub direction: Option<Direction>,
}

impl DegreeSample {
    pub fn new(values: Vec<u64>) -> Self {
        DegreeSample {
            values,
            direction: None,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sorted(&self) -> Vec<u64> {
        let mut v = self.values.clone();
        v.sort_unstable();
        v
    }
}

fn sample(g: &EntityGraph, direction: Direction) -> DegreeSample {
    DegreeSample {
        values: (0..g.node_count())
            .map(|v| g.degree(v, direction) as u64)
            .filter(|&d| d > 0)
            .collect(),
        direction: Some(direction),
    }
}

/// Out- and in-degree samples, zero degrees excluded.
pub fn degree_sequences(g: &EntityGraph) -> Result<(DegreeSample, DegreeSample)> {
    if g.edge_count() == 0 {
        return Err(Error::Edgeless);
    }
    Ok((sample(g, Direction::Out), sample(g, Direction::In)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CcdfRow {
    pub k: u64,
    pub ccdf: f64,
}

/// `P(X >= k)` at each distinct sample value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CcdfTable {
    pub rows: Vec<CcdfRow>,
    pub n: usize,
}

pub fn ccdf(sample: &DegreeSample) -> Result<CcdfTable> {
    if sample.is_empty() {
        return Err(Error::Precondition("ccdf of an empty sample".into()));
    }
    let sorted = sample.sorted();
    let n = sorted.len();
    let mut rows = Vec::new();
    let mut i = 0;
    while i < n {
        let k = sorted[i];
        rows.push(CcdfRow {
            k,
            ccdf: (n - i) as f64 / n as f64,
        });
        while i < n && sorted[i] == k {
            i += 1;
        }
    }
    Ok(CcdfTable { rows, n })
}

impl CcdfTable {
    /// Two-column `k<TAB>ccdf` text with a header line.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "k\tccdf")?;
        for r in &self.rows {
            writeln!(out, "{}\t{}", r.k, r.ccdf)?;
        }
        Ok(())
    }

    /// OLS slope of `ln ccdf` on `ln k`, read at ten log-spaced points per
    /// decade from `kmin` up to the last `k` with at least `min_tail`
    /// observations at or above it. `None` with fewer than three points.
    pub fn loglog_slope(&self, kmin: u64, min_tail: usize) -> Option<f64> {
        let kmin = kmin.max(1);
        let kmax = self
            .rows
            .iter()
            .filter(|r| (r.ccdf * self.n as f64).round() as usize >= min_tail)
            .map(|r| r.k)
            .max()?;
        if kmax <= kmin {
            return None;
        }
        let (lo, hi) = ((kmin as f64).log10(), (kmax as f64).log10());
        let steps = ((hi - lo) * SLOPE_POINTS_PER_DECADE).ceil() as usize;
        let mut grid: Vec<u64> = (0..=steps)
            .map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / steps as f64).round() as u64)
            .collect();
        grid.dedup();
        if grid.len() < 3 {
            return None;
        }
        // P(X >= k) is the ccdf of the first row at or above k.
        let mut row = 0;
        let (xs, ys): (Vec<f64>, Vec<f64>) = grid
            .iter()
            .map(|&k| {
                while self.rows[row].k < k {
                    row += 1;
                }
                ((k as f64).ln(), self.rows[row].ccdf.ln())
            })
            .unzip();
        stats::ols(&xs, &ys).map(|(slope, _)| slope)
    }
}

const SLOPE_POINTS_PER_DECADE: f64 = 10.0;

/// Measures in the size correlation matrix, in order.
pub const SIZE_MEASURES: [&str; 6] = [
    "d_out",
    "d_in",
    "assets",
    "assets_consolidated",
    "wages",
    "wages_consolidated",
];

/// Pairwise Pearson correlations of `ln(1 + x)` size measures.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationMatrix {
    pub labels: Vec<String>,
    /// `None` marks an undefined entry (fewer than three joint observations
    /// or no variance).
    pub values: Vec<Vec<Option<f64>>>,
    pub pair_counts: Vec<Vec<usize>>,
}

impl CorrelationMatrix {
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.values[i][j]
    }
}

/// Correlation matrix over out-degree, in-degree, entity and consolidated
/// assets, and entity and consolidated wages.
///
/// Consolidated measures count as observed only where the entity's own
/// report is present, and each entry uses every node where both of its
/// measures are observed.
pub fn size_correlation_matrix(
    g: &EntityGraph,
    assets_consolidated: &[f64],
    wages_consolidated: &[f64],
) -> CorrelationMatrix {
    let n = g.node_count();
    assert_eq!(assets_consolidated.len(), n);
    assert_eq!(wages_consolidated.len(), n);
    let columns: Vec<Vec<Option<f64>>> = vec![
        (0..n).map(|v| Some(g.out_degree(v) as f64)).collect(),
        (0..n).map(|v| Some(g.in_degree(v) as f64)).collect(),
        g.nodes().iter().map(|r| r.assets).collect(),
        g.nodes()
            .iter()
            .zip(assets_consolidated)
            .map(|(r, &c)| r.assets.map(|_| c))
            .collect(),
        g.nodes().iter().map(|r| r.wages).collect(),
        g.nodes()
            .iter()
            .zip(wages_consolidated)
            .map(|(r, &c)| r.wages.map(|_| c))
            .collect(),
    ];
    let m = columns.len();
    let mut values = vec![vec![None; m]; m];
    let mut pair_counts = vec![vec![0; m]; m];
    for i in 0..m {
        for j in i..m {
            let (xs, ys): (Vec<f64>, Vec<f64>) = columns[i]
                .iter()
                .zip(&columns[j])
                .filter_map(|(a, b)| Some(((*a)?.ln_1p(), (*b)?.ln_1p())))
                .unzip();
            pair_counts[i][j] = xs.len();
            pair_counts[j][i] = xs.len();
            let r = if xs.len() < 3 {
                None
            } else if i == j {
                Some(1.0)
            } else {
                stats::pearson(&xs, &ys)
            };
            values[i][j] = r;
            values[j][i] = r;
        }
    }
    CorrelationMatrix {
        labels: SIZE_MEASURES.iter().map(|s| s.to_string()).collect(),
        values,
        pair_counts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::test_util::graph;
    use crate::graph::{build_graph, EdgeRecord, NodeKind, NodeRecord};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn slope_of_exact_power_law_table() {
        let rows = (1..=100_000u64)
            .map(|k| CcdfRow {
                k,
                ccdf: (k as f64).powf(-1.5),
            })
            .collect();
        let t = CcdfTable { rows, n: 1 << 40 };
        assert!((t.loglog_slope(1, 10).unwrap() + 1.5).abs() < 1e-3);
        assert!((t.loglog_slope(50, 10).unwrap() + 1.5).abs() < 1e-3);
        // min_tail cuts the range at k = 2^(40/1.5) / 10^(2/1.5) ~ 1.1e6 > 1e5
        assert!(t.loglog_slope(99_000, 10).is_none());
    }

    fn sorted(mut s: DegreeSample) -> Vec<u64> {
        s.values.sort_unstable();
        s.values
    }

    #[test]
    fn star_chain_triangle_sequences() {
        let star = graph(
            &["P", "C1", "C2", "C3", "C4", "C5"],
            &[
                ("P", "C1"),
                ("P", "C2"),
                ("P", "C3"),
                ("P", "C4"),
                ("P", "C5"),
            ],
        );
        let (o, i) = degree_sequences(&star).unwrap();
        assert_eq!(sorted(o), vec![5]);
        assert_eq!(sorted(i), vec![1; 5]);

        let chain = graph(&["A", "B", "C"], &[("A", "B"), ("B", "C")]);
        let (o, i) = degree_sequences(&chain).unwrap();
        assert_eq!((sorted(o), sorted(i)), (vec![1, 1], vec![1, 1]));

        let tri = graph(&["A", "B", "C"], &[("A", "B"), ("A", "C"), ("B", "C")]);
        let (o, i) = degree_sequences(&tri).unwrap();
        assert_eq!((sorted(o), sorted(i)), (vec![1, 2], vec![1, 2]));
    }

    #[test]
    fn edgeless_graph_has_no_sequences() {
        assert!(matches!(
            degree_sequences(&graph(&["A"], &[])),
            Err(Error::Edgeless)
        ));
    }

    #[test]
    fn ccdf_hand_count() {
        let t = ccdf(&DegreeSample::new(vec![1, 1, 2, 4])).unwrap();
        let rows: Vec<(u64, f64)> = t.rows.iter().map(|r| (r.k, r.ccdf)).collect();
        assert_eq!(rows, vec![(1, 1.0), (2, 0.5), (4, 0.25)]);
        let t = ccdf(&DegreeSample::new(vec![3])).unwrap();
        assert_eq!(t.rows, vec![CcdfRow { k: 3, ccdf: 1.0 }]);
    }

    #[test]
    fn ccdf_tsv_format() {
        let t = ccdf(&DegreeSample::new(vec![1, 1, 2, 4])).unwrap();
        let mut buf = Vec::new();
        t.write_tsv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "k\tccdf\n1\t1\n2\t0.5\n4\t0.25\n"
        );
    }

    fn with_sizes(rows: &[(f64, f64)]) -> EntityGraph {
        let nodes = rows
            .iter()
            .enumerate()
            .map(|(i, &(a, w))| {
                NodeRecord::new(format!("n{i}"), NodeKind::CCorp)
                    .with_assets(a)
                    .with_wages(w)
            })
            .collect();
        build_graph(nodes, vec![]).unwrap()
    }

    #[test]
    fn identical_measures_correlate_perfectly() {
        // Degrees are all zero here, so only the financial block is defined.
        let g = with_sizes(&[(1.0, 1.0), (5.0, 5.0), (20.0, 20.0), (3.0, 3.0)]);
        let a: Vec<f64> = g.nodes().iter().map(|n| n.assets.unwrap()).collect();
        let m = size_correlation_matrix(&g, &a, &a);
        for i in 2..6 {
            for j in 2..6 {
                assert!((m.get(i, j).unwrap() - 1.0).abs() < 1e-12);
            }
        }
        assert_eq!(m.get(0, 2), None);
    }

    #[test]
    fn four_node_hand_dataset() {
        // A->B, A->C, B->C, D->A with hand-entered sizes.
        let n = |id: &str, a: Option<f64>, w: f64| {
            let mut r = NodeRecord::new(id, NodeKind::CCorp).with_wages(w);
            r.assets = a;
            r
        };
        let g = build_graph(
            vec![
                n("A", Some(10.0), 3.0),
                n("B", Some(0.0), 7.0),
                n("C", None, 1.0),
                n("D", Some(99.0), 0.0),
            ],
            vec![
                EdgeRecord::new("A", "B"),
                EdgeRecord::new("A", "C"),
                EdgeRecord::new("B", "C"),
                EdgeRecord::new("D", "A"),
            ],
        )
        .unwrap();
        let ac = vec![50.0, 5.0, 2.0, 120.0];
        let wc = vec![6.0, 8.0, 1.0, 4.0];
        let m = size_correlation_matrix(&g, &ac, &wc);

        // Spreadsheet-style oracle: explicit Pearson over the listed rows.
        fn oracle(x: &[f64], y: &[f64]) -> f64 {
            let n = x.len() as f64;
            let (sx, sy) = (x.iter().sum::<f64>(), y.iter().sum::<f64>());
            let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
            let sxx: f64 = x.iter().map(|a| a * a).sum();
            let syy: f64 = y.iter().map(|b| b * b).sum();
            (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt())
        }
        let l = |v: &[f64]| v.iter().map(|x: &f64| (1.0 + x).ln()).collect::<Vec<_>>();
        // Node order is A, B, C, D. d_out = 2,1,0,1; d_in = 1,1,2,0.
        let dout = l(&[2.0, 1.0, 0.0, 1.0]);
        let din = l(&[1.0, 1.0, 2.0, 0.0]);
        assert!((m.get(0, 1).unwrap() - oracle(&dout, &din)).abs() < 1e-12);
        // Assets are missing at C: pairwise deletion leaves A, B, D.
        let assets = l(&[10.0, 0.0, 99.0]);
        let dout_abd = l(&[2.0, 1.0, 1.0]);
        assert!((m.get(0, 2).unwrap() - oracle(&dout_abd, &assets)).abs() < 1e-12);
        assert_eq!(m.pair_counts[0][2], 3);
        let acons = l(&[50.0, 5.0, 120.0]);
        assert!((m.get(2, 3).unwrap() - oracle(&assets, &acons)).abs() < 1e-12);
        let wages = l(&[3.0, 7.0, 1.0, 0.0]);
        let wcons = l(&wc);
        assert!((m.get(4, 5).unwrap() - oracle(&wages, &wcons)).abs() < 1e-12);
        for i in 0..6 {
            assert_eq!(m.get(i, i), Some(1.0));
            for j in 0..6 {
                assert_eq!(m.get(i, j), m.get(j, i));
            }
        }
    }

    #[test]
    fn independent_measures_are_uncorrelated() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 10_000;
        let mut nodes = Vec::with_capacity(n);
        let mut edges = Vec::new();
        for i in 0..n {
            nodes.push(
                NodeRecord::new(format!("n{i:05}"), NodeKind::CCorp)
                    .with_assets(rng.random_range(0.0..1e6)),
            );
        }
        // Out-degree uniform on 0..=4, targets random.
        for i in 0..n {
            let d = rng.random_range(0..=4);
            let mut targets = std::collections::BTreeSet::new();
            while targets.len() < d {
                let t = rng.random_range(0..n);
                if t != i {
                    targets.insert(t);
                }
            }
            for t in targets {
                edges.push(EdgeRecord::new(format!("n{i:05}"), format!("n{t:05}")));
            }
        }
        let g = build_graph(nodes, edges).unwrap();
        let zeros = vec![0.0; n];
        let m = size_correlation_matrix(&g, &zeros, &zeros);
        assert!(m.get(0, 2).unwrap().abs() < 0.05);
    }
}
