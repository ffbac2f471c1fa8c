use std::collections::BTreeMap;
use std::ops::ControlFlow;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::canon::{canonical, class_label, funnel_class, mask_of, triad_class};
use super::esu::esu_root;
use crate::error::{Error, Result};
use crate::graph::EntityGraph;
use crate::seed;

pub const DEFAULT_BUDGET: u64 = 50_000_000;
pub const DEFAULT_SAMPLE_TARGET: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sampling {
    /// Probability with which each connected subset was kept.
    pub probability: f64,
    pub hits: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotifCensus {
    pub k: usize,
    /// Class label to count. Sampled censuses hold rounded estimates.
    pub counts: BTreeMap<String, u64>,
    /// Class label to fraction of the reported distribution.
    pub shares: BTreeMap<String, f64>,
    pub total: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub excluded_funnel_count: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub excluded_funnel_share: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampling: Option<Sampling>,
}

impl MotifCensus {
    /// `raw` is indexed by canonical mask.
    fn from_raw(
        k: usize,
        mut raw: Vec<u64>,
        exclude_funnel: bool,
        sampling: Option<Sampling>,
    ) -> MotifCensus {
        let scale = sampling.map_or(1.0, |s| 1.0 / s.probability);
        let estimate = |hits: u64| (hits as f64 * scale).round() as u64;
        let mut excluded_funnel_count = None;
        let mut excluded_funnel_share = None;
        if exclude_funnel && k == 4 {
            let all: u64 = raw.iter().sum();
            let f = std::mem::take(&mut raw[funnel_class() as usize]);
            excluded_funnel_count = Some(estimate(f));
            excluded_funnel_share = Some(if all == 0 { 0.0 } else { f as f64 / all as f64 });
        }
        let kept: u64 = raw.iter().sum();
        let mut counts = BTreeMap::new();
        let mut shares = BTreeMap::new();
        for (class, &hits) in raw.iter().enumerate() {
            if hits > 0 {
                let label = class_label(k, class as u16);
                counts.insert(label.clone(), estimate(hits));
                shares.insert(label, hits as f64 / kept as f64);
            }
        }
        MotifCensus {
            k,
            total: counts.values().sum(),
            counts,
            shares,
            excluded_funnel_count,
            excluded_funnel_share,
            sampling,
        }
    }

    pub fn count(&self, label: &str) -> u64 {
        self.counts.get(label).copied().unwrap_or(0)
    }

    pub fn share(&self, label: &str) -> f64 {
        self.shares.get(label).copied().unwrap_or(0.0)
    }

    /// Same census with the funnel class set aside and shares renormalised.
    /// Returns a copy unchanged for triads or when already excluded.
    pub fn excluding_funnel(&self) -> MotifCensus {
        if self.k != 4 || self.excluded_funnel_count.is_some() {
            return self.clone();
        }
        let label = class_label(4, funnel_class());
        let mut c = self.clone();
        let count = c.counts.remove(&label).unwrap_or(0);
        let share = c.shares.remove(&label).unwrap_or(0.0);
        let rest = 1.0 - share;
        for s in c.shares.values_mut() {
            *s /= rest;
        }
        c.total = c.counts.values().sum();
        c.excluded_funnel_count = Some(count);
        c.excluded_funnel_share = Some(share);
        c
    }
}

fn has_edge(g: &EntityGraph) -> impl Fn(u32, u32) -> bool + '_ {
    |a, b| g.has_edge(a as usize, b as usize)
}

/// Out-only, in-only and mutual neighbour counts.
fn dyad_counts(g: &EntityGraph, c: usize) -> (u64, u64, u64) {
    let (out, inn) = (g.out_neighbors(c), g.in_neighbors(c));
    let (mut i, mut j, mut m) = (0, 0, 0u64);
    while i < out.len() && j < inn.len() {
        match out[i].cmp(&inn[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                m += 1;
                i += 1;
                j += 1;
            }
        }
    }
    (out.len() as u64 - m, inn.len() as u64 - m, m)
}

fn pairs(x: u64) -> i64 {
    (x * x.saturating_sub(1) / 2) as i64
}

fn add_into(mut a: Vec<i64>, b: Vec<i64>) -> Vec<i64> {
    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
    a
}

/// Census of connected 3-node induced subgraphs, labelled with MAN codes.
///
/// Open triads are counted from each centre's dyad mix; triangles are listed
/// once each and moved from the open classes they were counted under into
/// their own class.
pub fn triad_census(g: &EntityGraph) -> MotifCensus {
    let t = |l: &str| triad_class(l).unwrap() as usize;
    let (d021d, d021u, d021c, d111u, d111d, d201) = (
        t("021D"),
        t("021U"),
        t("021C"),
        t("111U"),
        t("111D"),
        t("201"),
    );
    let n = g.node_count();

    let open = (0..n)
        .into_par_iter()
        .fold(
            || vec![0i64; 64],
            |mut acc, c| {
                let (o, i, m) = dyad_counts(g, c);
                acc[d021d] += pairs(o);
                acc[d021u] += pairs(i);
                acc[d021c] += (o * i) as i64;
                acc[d111u] += (m * o) as i64;
                acc[d111d] += (m * i) as i64;
                acc[d201] += pairs(m);
                acc
            },
        )
        .reduce(|| vec![0i64; 64], add_into);

    // Orient each undirected link towards the higher (degree, index) end.
    let adj = g.undirected();
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
    let edge = has_edge(g);
    let closed = (0..n)
        .into_par_iter()
        .fold(
            || vec![0i64; 64],
            |mut acc, u| {
                let fu = &forward[u];
                for &v in fu {
                    let fv = &forward[v as usize];
                    let (mut a, mut b) = (0, 0);
                    while a < fu.len() && b < fv.len() {
                        match fu[a].cmp(&fv[b]) {
                            std::cmp::Ordering::Less => a += 1,
                            std::cmp::Ordering::Greater => b += 1,
                            std::cmp::Ordering::Equal => {
                                let tri = [u as u32, v, fu[a]];
                                let mask = mask_of(&tri, &edge);
                                acc[canonical(3, mask) as usize] += 1;
                                for x in 0..3 {
                                    let (y, z) = ((x + 1) % 3, (x + 2) % 3);
                                    let open = mask
                                        & !(1 << super::canon::bit(3, y, z))
                                        & !(1 << super::canon::bit(3, z, y));
                                    acc[canonical(3, open) as usize] -= 1;
                                }
                                a += 1;
                                b += 1;
                            }
                        }
                    }
                }
                acc
            },
        )
        .reduce(|| vec![0i64; 64], add_into);

    let raw = add_into(open, closed)
        .into_iter()
        .map(|c| {
            debug_assert!(c >= 0);
            c as u64
        })
        .collect();
    MotifCensus::from_raw(3, raw, false, None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CensusMode {
    /// Full enumeration; fails past `budget` subgraphs.
    Exact { budget: u64 },
    /// Keeps each connected subset with a common probability sized so about
    /// `target` subsets are expected.
    Sampled { target: u64, seed: u64 },
    /// Exact when the subset bound fits the budget, sampled otherwise.
    Auto { budget: u64, target: u64, seed: u64 },
}

impl Default for CensusMode {
    fn default() -> Self {
        CensusMode::Auto {
            budget: DEFAULT_BUDGET,
            target: DEFAULT_SAMPLE_TARGET,
            seed: 0,
        }
    }
}

/// Upper bound on the number of connected 4-node subsets: every one is
/// spanned by a 3-star or a 3-edge path.
pub fn connected_quad_bound(g: &EntityGraph) -> f64 {
    let adj = g.undirected();
    let d = |v: usize| adj.degree(v) as f64;
    let stars: f64 = (0..g.node_count())
        .map(|v| d(v) * (d(v) - 1.0) * (d(v) - 2.0) / 6.0)
        .sum();
    let paths: f64 = (0..g.node_count())
        .flat_map(|u| {
            adj.neighbors(u)
                .iter()
                .filter(move |&&w| (w as usize) > u)
                .map(move |&w| (u, w as usize))
        })
        .map(|(u, w)| (d(u) - 1.0) * (d(w) - 1.0))
        .sum();
    stars + paths
}

/// Exact census of connected induced `k`-node subgraphs by enumeration.
pub fn enumerate_census(g: &EntityGraph, k: usize, budget: u64) -> Result<MotifCensus> {
    Ok(MotifCensus::from_raw(
        k,
        enumerate_raw(g, k, budget)?,
        false,
        None,
    ))
}

fn enumerate_raw(g: &EntityGraph, k: usize, budget: u64) -> Result<Vec<u64>> {
    assert!(k == 3 || k == 4, "census supports k = 3 or 4");
    let adj = g.undirected();
    let seen = AtomicU64::new(0);
    let edge = has_edge(g);
    let size = 1usize << (k * (k - 1));
    (0..g.node_count() as u32)
        .into_par_iter()
        .try_fold(
            || vec![0u64; size],
            |mut acc, v| {
                let mut local = 0u64;
                let flow = esu_root(adj, k, v, &mut |_| true, &mut |sub| {
                    acc[canonical(k, mask_of(sub, &edge)) as usize] += 1;
                    local += 1;
                    if local & 0xffff == 0 && seen.load(Ordering::Relaxed) + local > budget {
                        ControlFlow::Break(())
                    } else {
                        ControlFlow::Continue(())
                    }
                });
                let total = seen.fetch_add(local, Ordering::Relaxed) + local;
                if flow.is_break() || total > budget {
                    Err(Error::BudgetExceeded { budget })
                } else {
                    Ok(acc)
                }
            },
        )
        .try_reduce(
            || vec![0u64; size],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )
}

fn sample_raw(g: &EntityGraph, k: usize, probability: f64, seed_value: u64) -> Vec<u64> {
    let adj = g.undirected();
    let edge = has_edge(g);
    // Second nodes are always kept; deeper levels share the thinning so
    // subsets hanging off one hub are not kept or dropped wholesale.
    let p = probability.powf(1.0 / (k - 2) as f64);
    let size = 1usize << (k * (k - 1));
    (0..g.node_count() as u32)
        .into_par_iter()
        .fold(
            || vec![0u64; size],
            |mut acc, v| {
                if adj.degree(v as usize) == 0 {
                    return acc;
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(
                    seed_value,
                    seed::stream::MOTIF_SAMPLING,
                    v as u64,
                ));
                let _ = esu_root(
                    adj,
                    k,
                    v,
                    &mut |depth| depth == 2 || p >= 1.0 || rng.random::<f64>() < p,
                    &mut |sub| {
                        acc[canonical(k, mask_of(sub, &edge)) as usize] += 1;
                        ControlFlow::Continue(())
                    },
                );
                acc
            },
        )
        .reduce(
            || vec![0u64; size],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

/// Census of connected 4-node induced subgraphs under the default mode.
pub fn four_node_census(g: &EntityGraph, exclude_funnel: bool) -> Result<MotifCensus> {
    four_node_census_with(g, exclude_funnel, CensusMode::default())
}

pub fn four_node_census_with(
    g: &EntityGraph,
    exclude_funnel: bool,
    mode: CensusMode,
) -> Result<MotifCensus> {
    let sampled = |target: u64, seed: u64| {
        let bound = connected_quad_bound(g);
        let probability = if bound <= 0.0 {
            1.0
        } else {
            (target as f64 / bound).min(1.0)
        };
        let raw = sample_raw(g, 4, probability, seed);
        let sampling = Sampling {
            probability,
            hits: raw.iter().sum(),
            seed,
        };
        MotifCensus::from_raw(4, raw, exclude_funnel, Some(sampling))
    };
    match mode {
        CensusMode::Exact { budget } => Ok(MotifCensus::from_raw(
            4,
            enumerate_raw(g, 4, budget)?,
            exclude_funnel,
            None,
        )),
        CensusMode::Sampled { target, seed } => Ok(sampled(target, seed)),
        CensusMode::Auto {
            budget,
            target,
            seed,
        } => {
            if connected_quad_bound(g) <= budget as f64 {
                Ok(MotifCensus::from_raw(
                    4,
                    enumerate_raw(g, 4, budget)?,
                    exclude_funnel,
                    None,
                ))
            } else {
                Ok(sampled(target, seed))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::test_util::{graph, indexed};
    use crate::motifs::canon::fan_out_class;
    use crate::synth::{gen_directed_scale_free, gen_er_digraph, gen_random_tree, ScaleFreeParams};

    #[test]
    fn paper_triads() {
        let g = graph(&["A", "B", "C"], &[("A", "C"), ("B", "C")]);
        assert_eq!(
            triad_census(&g).counts,
            BTreeMap::from([("021U".to_string(), 1)])
        );
        let g = graph(&["A", "B", "C"], &[("A", "B"), ("A", "C")]);
        assert_eq!(
            triad_census(&g).counts,
            BTreeMap::from([("021D".to_string(), 1)])
        );
        let g = graph(&["A", "B", "C"], &[("A", "B"), ("B", "C"), ("A", "C")]);
        assert_eq!(
            triad_census(&g).counts,
            BTreeMap::from([("030T".to_string(), 1)])
        );
    }

    #[test]
    fn combinatorial_triads_match_enumeration() {
        for (seed, p) in (0..12).zip([0.05, 0.1, 0.2, 0.35, 0.5, 0.8].iter().cycle()) {
            let g = gen_er_digraph(30, *p, seed).unwrap();
            assert_eq!(
                triad_census(&g),
                enumerate_census(&g, 3, u64::MAX).unwrap(),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn tree_has_only_dag_classes() {
        let g = gen_random_tree(300, 2).unwrap();
        let c = triad_census(&g);
        for label in c.counts.keys() {
            assert!(
                ["021U", "021D", "021C", "030T"].contains(&label.as_str()),
                "{label}"
            );
        }
        assert_eq!(c.count("030T"), 0);
        assert_eq!(c.count("021U"), 0);
    }

    #[test]
    fn star_and_funnel() {
        let star = indexed(4, &[(0, 1), (0, 2), (0, 3)]);
        let c = four_node_census(&star, false).unwrap();
        assert_eq!(
            c.counts,
            BTreeMap::from([(class_label(4, fan_out_class()), 1)])
        );
        assert!(c.sampling.is_none());

        let funnel = indexed(4, &[(0, 3), (1, 3), (2, 3)]);
        let c = four_node_census(&funnel, true).unwrap();
        assert!(c.counts.is_empty());
        assert_eq!(c.excluded_funnel_share, Some(1.0));
        assert_eq!(c.excluded_funnel_count, Some(1));
    }

    #[test]
    fn funnel_view_matches_direct_exclusion() {
        for seed in 0..4 {
            let g = gen_er_digraph(14, 0.2, seed).unwrap();
            let direct = four_node_census(&g, true).unwrap();
            let view = four_node_census(&g, false).unwrap().excluding_funnel();
            assert_eq!(direct.counts, view.counts);
            assert_eq!(direct.excluded_funnel_count, view.excluded_funnel_count);
            assert!(
                (direct.excluded_funnel_share.unwrap() - view.excluded_funnel_share.unwrap()).abs()
                    < 1e-12
            );
            for (l, s) in &direct.shares {
                assert!((s - view.share(l)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let g = gen_er_digraph(12, 0.5, 1).unwrap();
        let err = four_node_census_with(&g, false, CensusMode::Exact { budget: 10 });
        assert!(matches!(err, Err(Error::BudgetExceeded { budget: 10 })));
        assert!(four_node_census_with(&g, false, CensusMode::Exact { budget: 1_000 }).is_ok());
    }

    #[test]
    fn bound_dominates_count() {
        for seed in 0..5 {
            let g = gen_er_digraph(25, 0.12, seed).unwrap();
            let exact = enumerate_census(&g, 4, u64::MAX).unwrap();
            assert!(exact.total as f64 <= connected_quad_bound(&g));
        }
    }

    #[test]
    fn sampled_shares_converge() {
        let g = gen_directed_scale_free(
            ScaleFreeParams {
                n_edges: 20_000,
                p_new_source: 0.4,
                p_new_target: 0.2,
                offset_in: 1.0,
                offset_out: 1.0,
            },
            5,
        )
        .unwrap();
        let exact =
            four_node_census_with(&g, true, CensusMode::Exact { budget: u64::MAX }).unwrap();
        let sampled = four_node_census_with(
            &g,
            true,
            CensusMode::Sampled {
                target: 1_000_000,
                seed: 3,
            },
        )
        .unwrap();
        let s = sampled.sampling.unwrap();
        assert!(s.probability < 0.5, "{s:?} exact total {}", exact.total);
        for (label, &share) in &exact.shares {
            assert!(
                (share - sampled.share(label)).abs() <= 0.01,
                "{label}: {share} vs {}",
                sampled.share(label)
            );
        }
        let rel = |a: u64, b: u64| (a as f64 - b as f64).abs() / b as f64;
        assert!(rel(sampled.total, exact.total) < 0.05);
        assert!(
            (sampled.excluded_funnel_share.unwrap() - exact.excluded_funnel_share.unwrap()).abs()
                <= 0.01,
            "{:?} {:?} {s:?} {}",
            sampled.excluded_funnel_share,
            exact.excluded_funnel_share,
            exact.total
        );
        let again = four_node_census_with(
            &g,
            true,
            CensusMode::Sampled {
                target: 1_000_000,
                seed: 3,
            },
        )
        .unwrap();
        assert_eq!(again, sampled);
    }
}
