use capnet::consolidation::{consolidate_values, SharePolicy};
use capnet::degree::{ccdf, degree_sequences, DegreeSample};
use capnet::graph::EdgeSource;
use capnet::ingest::{dedupe_edges, filter_network, NetworkScope};
use capnet::motifs::{
    count_shortcut_edges, count_simple_cycles, four_node_census_with, triad_census, CensusMode,
};
use capnet::paths::{path_stats, PathMode};
use capnet::{build_graph, EdgeRecord, EntityGraph, NodeKind, NodeRecord};
use proptest::prelude::*;

fn digraph() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (2usize..12).prop_flat_map(|n| (Just(n), proptest::collection::vec((0..n, 0..n), 0..3 * n)))
}

fn build(n: usize, pairs: &[(usize, usize)], name: impl Fn(usize) -> String) -> EntityGraph {
    let nodes = (0..n)
        .map(|i| NodeRecord::new(name(i), NodeKind::CCorp))
        .collect();
    let edges = pairs
        .iter()
        .filter(|(a, b)| a != b)
        .map(|&(a, b)| EdgeRecord::new(name(a), name(b)))
        .collect();
    build_graph(nodes, edges).unwrap()
}

fn plain(n: usize, pairs: &[(usize, usize)]) -> EntityGraph {
    build(n, pairs, |i| format!("v{i:02}"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn handshake((n, pairs) in digraph()) {
        let g = plain(n, &pairs);
        if g.edge_count() > 0 {
            let (out, inn) = degree_sequences(&g).unwrap();
            let m = g.edge_count() as u64;
            prop_assert_eq!(out.values.iter().sum::<u64>(), m);
            prop_assert_eq!(inn.values.iter().sum::<u64>(), m);
        }
        let und: usize = (0..n).map(|v| g.undirected().degree(v)).sum();
        prop_assert_eq!(und % 2, 0);
    }

    #[test]
    fn relabelling_preserves_measures((n, pairs) in digraph(), perm_seed in any::<u64>()) {
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = perm_seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let a = plain(n, &pairs);
        let b = build(n, &pairs, |i| format!("w{:02}", perm[i]));
        prop_assert_eq!(triad_census(&a).counts, triad_census(&b).counts);
        let exact = CensusMode::Exact { budget: u64::MAX };
        prop_assert_eq!(
            four_node_census_with(&a, false, exact).unwrap().counts,
            four_node_census_with(&b, false, exact).unwrap().counts
        );
        prop_assert_eq!(count_simple_cycles(&a, 1 << 20).unwrap(), count_simple_cycles(&b, 1 << 20).unwrap());
        prop_assert_eq!(count_shortcut_edges(&a).count, count_shortcut_edges(&b).count);
        let pa = path_stats(&a, PathMode::Exact);
        let pb = path_stats(&b, PathMode::Exact);
        prop_assert_eq!(pa.is_ok(), pb.is_ok());
        if let (Ok(pa), Ok(pb)) = (pa, pb) {
            prop_assert_eq!(pa, pb);
        }
    }

    #[test]
    fn dedupe_is_idempotent(rows in proptest::collection::vec((0u8..5, 0u8..5, proptest::option::of(1u32..200), 0u8..3), 0..40)) {
        let records: Vec<EdgeRecord> = rows
            .iter()
            .filter(|(a, b, _, _)| a != b)
            .map(|&(a, b, share, src)| {
                let mut r = EdgeRecord::new(format!("p{a}"), format!("p{b}"));
                if let Some(pct) = share {
                    r = r.with_share(pct as f64 / 100.0);
                }
                r.with_source([EdgeSource::ParentReport, EdgeSource::ChildReport, EdgeSource::Merged][src as usize])
            })
            .collect();
        let once = dedupe_edges(records).edges;
        let twice = dedupe_edges(once.clone());
        prop_assert_eq!(twice.discrepancies, 0);
        prop_assert_eq!(twice.edges, once);
    }

    #[test]
    fn filter_is_idempotent((n, pairs) in digraph(), kinds in proptest::collection::vec(0usize..10, 12), naics in proptest::collection::vec(0usize..3, 12), scope_ix in 0usize..3, gcc in any::<bool>()) {
        let nodes: Vec<NodeRecord> = (0..n)
            .map(|i| {
                let node = NodeRecord::new(format!("v{i:02}"), NodeKind::ALL[kinds[i]]);
                match naics[i] {
                    0 => node,
                    1 => node.with_naics("523920"),
                    _ => node.with_naics("311811"),
                }
            })
            .collect();
        let edges = pairs
            .iter()
            .filter(|(a, b)| a != b)
            .map(|&(a, b)| EdgeRecord::new(format!("v{a:02}"), format!("v{b:02}")))
            .collect();
        let g = build_graph(nodes, edges).unwrap();
        let scope = [NetworkScope::entities(), NetworkScope::all(), NetworkScope::no_fire()][scope_ix]
            .clone()
            .with_gcc_only(gcc);
        if let Ok(once) = filter_network(&g, &scope) {
            let twice = filter_network(&once, &scope).unwrap();
            prop_assert_eq!(once.to_records(), twice.to_records());
        }
    }

    #[test]
    fn consolidation_is_monotone(
        n in 2usize..30,
        links in proptest::collection::vec((any::<u16>(), any::<u16>(), 1u32..100), 1..60),
        own in proptest::collection::vec(0.0f64..1e6, 30),
        bump_at in 0usize..30,
        bump in 0.0f64..1e6,
    ) {
        // Parent index below child index keeps the graph acyclic.
        let mut pairs: Vec<(usize, usize, f64)> = links
            .iter()
            .map(|&(a, b, w)| (a as usize % n, b as usize % n, w as f64))
            .filter(|(a, b, _)| a < b)
            .collect();
        pairs.sort_by_key(|&(a, b, _)| (a, b));
        pairs.dedup_by_key(|&mut (a, b, _)| (a, b));
        let mut totals = vec![0.0; n];
        for &(_, c, w) in &pairs {
            totals[c] += w;
        }
        let nodes = (0..n).map(|i| NodeRecord::new(format!("v{i:02}"), NodeKind::CCorp)).collect();
        let edges = pairs
            .iter()
            .map(|&(a, c, w)| EdgeRecord::new(format!("v{a:02}"), format!("v{c:02}")).with_share(w / totals[c]))
            .collect();
        let g = build_graph(nodes, edges).unwrap();
        let base = own[..n].to_vec();
        let mut raised = base.clone();
        raised[bump_at % n] += bump;
        let a = consolidate_values(&g, &base, SharePolicy::EqualSplit).unwrap().values;
        let b = consolidate_values(&g, &raised, SharePolicy::EqualSplit).unwrap().values;
        for (x, y) in a.iter().zip(&b) {
            prop_assert!(*y >= *x - 1e-9 * x.abs().max(1.0));
        }
    }

    #[test]
    fn ccdf_rows_are_monotone(values in proptest::collection::vec(1u64..500, 1..300)) {
        let table = ccdf(&DegreeSample::new(values)).unwrap();
        prop_assert_eq!(table.rows[0].ccdf, 1.0);
        for w in table.rows.windows(2) {
            prop_assert!(w[0].k < w[1].k);
            prop_assert!(w[0].ccdf >= w[1].ccdf);
        }
        let mut buf = Vec::new();
        table.write_tsv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let parsed: Vec<(u64, f64)> = text
            .lines()
            .skip(1)
            .map(|l| {
                let mut it = l.split('\t');
                (it.next().unwrap().parse().unwrap(), it.next().unwrap().parse().unwrap())
            })
            .collect();
        prop_assert_eq!(parsed.len(), table.rows.len());
        for w in parsed.windows(2) {
            prop_assert!(w[0].0 < w[1].0 && w[0].1 >= w[1].1);
        }
    }
}
