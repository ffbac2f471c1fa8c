//! Full measurement pipeline and its JSON/TSV outputs.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;

use serde::Serialize;

use crate::components::extract_gcc;
use crate::consolidation::{consolidate, Convergence, Measure, SharePolicy};
use crate::degree::{
    ccdf, degree_sequences, size_correlation_matrix, CcdfTable, CorrelationMatrix, DegreeSample,
};
use crate::error::{Error, Result};
use crate::graph::{build_graph, Direction, EntityGraph};
use crate::ingest::{dedupe_edges, filter_network, parse_edges_csv, parse_nodes_csv, NetworkScope};
use crate::motifs::{
    count_shortcut_edges_within, count_simple_cycles, four_node_census_with, triad_census,
    CensusMode, CycleReport, MotifCensus, ShortcutReport, DEFAULT_BUDGET, DEFAULT_CYCLE_CAP,
    DEFAULT_SAMPLE_TARGET,
};
use crate::paths::{
    avg_clustering, degree_assortativity, expected_small_world_diameter, path_stats, PathMode,
    PathStats, DEFAULT_EXACT_CAP, DEFAULT_SAMPLE_SOURCES,
};
use crate::powerlaw::{
    bootstrap_ci_with, fit_lognormal_tail, fit_power_law, gof_pvalue, vuong_lr_test,
    ConfidenceInterval, GofResult, LognormalFit, LrTestResult, PowerLawFit, XminMode,
};
use crate::seed;

pub const SCHEMA: &str = "capnet-report/1";
/// Observations needed at or above `k` for a CCDF point to enter the slope fit.
pub const CCDF_SLOPE_MIN_TAIL: usize = 100;

/// A measured value or the reason it is missing.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome<T> {
    Value(T),
    Skipped(String),
}

impl<T> Outcome<T> {
    pub fn value(&self) -> Option<&T> {
        match self {
            Outcome::Value(v) => Some(v),
            Outcome::Skipped(_) => None,
        }
    }

    pub fn skipped(reason: impl Into<String>) -> Self {
        Outcome::Skipped(reason.into())
    }
}

impl<T> From<Result<T>> for Outcome<T> {
    fn from(r: Result<T>) -> Self {
        match r {
            Ok(v) => Outcome::Value(v),
            Err(e) => Outcome::Skipped(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportConfig {
    pub seed: u64,
    /// Bootstrap replicates per degree direction; 0 skips the intervals.
    pub bootstrap: usize,
    /// Goodness-of-fit simulations; 0 skips the test.
    pub gof_sims: usize,
    pub xmin: XminMode,
    pub share_policy: SharePolicy,
    /// Largest giant component measured with exact all-source searches.
    pub exact_paths_cap: usize,
    pub sample_sources: usize,
    pub census_budget: u64,
    pub census_sample_target: u64,
    pub cycle_cap: u64,
    /// Above this many nodes shortcut searches stop at `shortcut_max_depth`.
    pub shortcut_exact_cap: usize,
    pub shortcut_max_depth: u32,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            seed: 0,
            bootstrap: 1000,
            gof_sims: 0,
            xmin: XminMode::ScanAll,
            share_policy: SharePolicy::EqualSplit,
            exact_paths_cap: DEFAULT_EXACT_CAP,
            sample_sources: DEFAULT_SAMPLE_SOURCES,
            census_budget: DEFAULT_BUDGET,
            census_sample_target: DEFAULT_SAMPLE_TARGET,
            cycle_cap: DEFAULT_CYCLE_CAP,
            shortcut_exact_cap: 200_000,
            shortcut_max_depth: 3,
        }
    }
}

/// Conventions behind the numbers, echoed for readers of the report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decisions {
    pub bootstrap: &'static str,
    pub xmin_selection: &'static str,
    pub lr_test_cutoff: &'static str,
    pub share_policy: SharePolicy,
    pub over_unity_shares: &'static str,
    pub consolidation: &'static str,
    pub census: &'static str,
    pub funnel: &'static str,
    pub paths: &'static str,
    pub median: &'static str,
    pub assortativity: &'static str,
    pub multiple_paths: &'static str,
    pub fire_exclusion: &'static str,
}

impl Decisions {
    fn new(policy: SharePolicy) -> Self {
        Decisions {
            bootstrap: "nonparametric, full refit with cutoff scan per replicate",
            xmin_selection: "minimum KS distance over distinct values up to the 95th percentile",
            lr_test_cutoff: "lognormal fitted above the power-law xmin",
            share_policy: policy,
            over_unity_shares: "used as reported, children flagged",
            consolidation: "recursive through ownership chains",
            census: "connected induced subgraphs",
            funnel: "three parents of one child, reported separately",
            paths: "undirected shortest paths in the giant component",
            median: "upper median over ordered pairs",
            assortativity: "raw undirected degrees, both orientations of each link",
            multiple_paths: "edges whose child is also reachable by a longer path",
            fire_exclusion: "FIRE nodes removed with their links",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct InputSummary {
    pub nodes_file: String,
    pub edges_file: String,
    pub nodes_read: usize,
    pub edge_rows_read: usize,
    pub unique_edges: usize,
    pub share_discrepancies: usize,
    pub unknown_kinds: usize,
    pub over_unity_share_rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeReport {
    pub direction: Direction,
    #[serde(flatten)]
    pub tail: TailAnalysis,
}

/// Heavy-tail analysis of one sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailAnalysis {
    /// Sample size (nonzero degrees only, for degree samples).
    pub n: usize,
    pub power_law: Outcome<PowerLawFit>,
    pub bootstrap: Outcome<ConfidenceInterval>,
    pub lognormal: Outcome<LognormalFit>,
    pub lr_test: Outcome<LrTestResult>,
    pub gof: Outcome<GofResult>,
    pub ccdf_slope: Outcome<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsolidationSummary {
    pub convergence: Convergence,
    pub over_unity_children: usize,
    pub own_total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusReport {
    pub raw: MotifCensus,
    pub funnel_excluded: MotifCensus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkReport {
    pub schema: &'static str,
    pub config: ReportConfig,
    pub scope: NetworkScope,
    pub decisions: Decisions,
    pub input: InputSummary,
    pub node_count: usize,
    pub edge_count: usize,
    pub percent_in_gcc: f64,
    pub gcc_node_count: usize,
    pub gcc_edge_count: usize,
    pub degree_out: DegreeReport,
    pub degree_in: DegreeReport,
    pub paths: Outcome<PathStats>,
    pub expected_diameter: Outcome<f64>,
    pub avg_clustering: f64,
    pub assortativity: Outcome<f64>,
    pub triad_census: MotifCensus,
    pub four_node_census: Outcome<CensusReport>,
    pub cycles: Outcome<CycleReport>,
    pub shortcuts: ShortcutReport,
    pub consolidated_assets: Outcome<ConsolidationSummary>,
    pub consolidated_wages: Outcome<ConsolidationSummary>,
    pub correlations: Outcome<CorrelationMatrix>,
}

/// Report plus the CCDF tables written beside it.
#[derive(Debug, Clone)]
pub struct ReportOutput {
    pub report: NetworkReport,
    pub ccdf_out: CcdfTable,
    pub ccdf_in: CcdfTable,
}

fn file_name(p: &Path) -> String {
    p.file_name().map_or_else(
        || p.display().to_string(),
        |f| f.to_string_lossy().into_owned(),
    )
}

/// Reads, deduplicates and builds the raw network.
pub fn load_network(nodes_path: &Path, edges_path: &Path) -> Result<(EntityGraph, InputSummary)> {
    let open = |p: &Path| {
        File::open(p)
            .map(BufReader::new)
            .map_err(|e| Error::Io(e).in_stage("ingest"))
    };
    let nodes = parse_nodes_csv(open(nodes_path)?).map_err(|e| e.in_stage("ingest nodes"))?;
    let edges = parse_edges_csv(open(edges_path)?).map_err(|e| e.in_stage("ingest edges"))?;
    let edge_rows_read = edges.edges.len();
    let deduped = dedupe_edges(edges.edges);
    let summary = InputSummary {
        nodes_file: file_name(nodes_path),
        edges_file: file_name(edges_path),
        nodes_read: nodes.nodes.len(),
        edge_rows_read,
        unique_edges: deduped.edges.len(),
        share_discrepancies: deduped.discrepancies,
        unknown_kinds: nodes.unknown_kinds,
        over_unity_share_rows: edges.over_unity_shares,
    };
    let g = build_graph(nodes.nodes, deduped.edges).map_err(|e| e.in_stage("build graph"))?;
    Ok((g, summary))
}

fn degree_report(
    sample: &DegreeSample,
    direction: Direction,
    config: &ReportConfig,
) -> DegreeReport {
    let seed_value = seed::derive(config.seed, seed::stream::DIRECTION, direction as u64);
    DegreeReport {
        direction,
        tail: analyze_tail(sample, config, seed_value),
    }
}

/// Power-law fit, bootstrap interval, lognormal comparison and CCDF slope.
/// `seed` drives the resampling; `config.seed` is not consulted.
pub fn analyze_tail(sample: &DegreeSample, config: &ReportConfig, seed_value: u64) -> TailAnalysis {
    let fitted = fit_power_law(sample, config.xmin);
    // Slope over the fitted tail, or the whole range when there is no fit.
    let kmin = fitted.as_ref().map_or(1, |f| f.xmin);
    let ccdf_slope = ccdf(sample)
        .map(|t| t.loglog_slope(kmin, CCDF_SLOPE_MIN_TAIL))
        .and_then(|s| {
            s.ok_or_else(|| Error::EstimationUnreliable("too few CCDF points for a slope".into()))
        });
    let mut report = TailAnalysis {
        n: sample.len(),
        power_law: Outcome::skipped("not run"),
        bootstrap: Outcome::skipped("no power-law fit"),
        lognormal: Outcome::skipped("no power-law fit"),
        lr_test: Outcome::skipped("no power-law fit"),
        gof: Outcome::skipped("no power-law fit"),
        ccdf_slope: ccdf_slope.into(),
    };
    let mut fit = match fitted {
        Ok(f) => f,
        Err(e) => {
            report.power_law = Outcome::Skipped(e.to_string());
            return report;
        }
    };
    report.bootstrap = if config.bootstrap == 0 {
        Outcome::skipped("bootstrap disabled")
    } else {
        bootstrap_ci_with(sample, config.xmin, config.bootstrap, seed_value).into()
    };
    if let Some(ci) = report.bootstrap.value() {
        fit.ci95 = Some((ci.lo, ci.hi));
    }
    let lognormal = fit_lognormal_tail(sample, fit.xmin);
    report.lr_test = match &lognormal {
        Ok(ln) => vuong_lr_test(sample, &fit, ln).into(),
        Err(e) => Outcome::Skipped(format!("no lognormal fit: {e}")),
    };
    report.lognormal = lognormal.into();
    report.gof = if config.gof_sims == 0 {
        Outcome::skipped("goodness-of-fit disabled")
    } else {
        gof_pvalue(sample, &fit, config.gof_sims, seed_value).into()
    };
    report.power_law = Outcome::Value(fit);
    report
}

fn summarize_consolidation(
    g: &EntityGraph,
    measure: Measure,
    policy: SharePolicy,
) -> (Outcome<ConsolidationSummary>, Option<Vec<f64>>) {
    match consolidate(g, measure, policy) {
        Ok(c) => {
            let own_total = g
                .nodes()
                .iter()
                .filter_map(|n| match measure {
                    Measure::Assets => n.assets,
                    Measure::Wages => n.wages,
                })
                .sum();
            let summary = ConsolidationSummary {
                convergence: c.convergence,
                over_unity_children: c.over_unity_children.len(),
                own_total,
            };
            (Outcome::Value(summary), Some(c.values))
        }
        Err(e) => (Outcome::Skipped(e.to_string()), None),
    }
}

/// Runs every measurement on an already loaded network.
pub fn build_report(
    raw: &EntityGraph,
    input: InputSummary,
    scope: &NetworkScope,
    config: &ReportConfig,
) -> Result<ReportOutput> {
    let scoped = filter_network(raw, &scope.clone().with_gcc_only(false))
        .map_err(|e| e.in_stage("scope"))?;
    let gcc = extract_gcc(&scoped).map_err(|e| e.in_stage("giant component"))?;
    let percent_in_gcc = 100.0 * gcc.fraction_in_gcc;
    let g = if scope.gcc_only {
        gcc.graph.clone()
    } else {
        scoped
    };
    let gcc = gcc.graph;

    let (out_deg, in_deg) = degree_sequences(&g).map_err(|e| e.in_stage("degrees"))?;
    let ccdf_out = ccdf(&out_deg).map_err(|e| e.in_stage("ccdf"))?;
    let ccdf_in = ccdf(&in_deg).map_err(|e| e.in_stage("ccdf"))?;
    let degree_out = degree_report(&out_deg, Direction::Out, config);
    let degree_in = degree_report(&in_deg, Direction::In, config);

    let paths = path_stats(
        &gcc,
        PathMode::Auto {
            exact_cap: config.exact_paths_cap,
            sources: config.sample_sources,
            seed: config.seed,
        },
    )
    .into();
    let expected_diameter = expected_small_world_diameter(gcc.node_count() as u64).into();
    let assortativity = match degree_assortativity(&g) {
        Ok(Some(r)) => Outcome::Value(r),
        Ok(None) => Outcome::skipped("undefined: endpoint degrees do not vary"),
        Err(e) => Outcome::Skipped(e.to_string()),
    };

    let census_mode = CensusMode::Auto {
        budget: config.census_budget,
        target: config.census_sample_target,
        seed: config.seed,
    };
    let four_node_census = four_node_census_with(&gcc, false, census_mode)
        .map(|raw| CensusReport {
            funnel_excluded: raw.excluding_funnel(),
            raw,
        })
        .into();
    let depth = (g.node_count() > config.shortcut_exact_cap).then_some(config.shortcut_max_depth);

    let (consolidated_assets, assets_c) =
        summarize_consolidation(&g, Measure::Assets, config.share_policy);
    let (consolidated_wages, wages_c) =
        summarize_consolidation(&g, Measure::Wages, config.share_policy);
    let correlations = match (assets_c, wages_c) {
        (Some(a), Some(w)) => Outcome::Value(size_correlation_matrix(&g, &a, &w)),
        _ => Outcome::skipped("consolidated measures unavailable"),
    };

    let report = NetworkReport {
        schema: SCHEMA,
        config: config.clone(),
        scope: scope.clone(),
        decisions: Decisions::new(config.share_policy),
        input,
        node_count: g.node_count(),
        edge_count: g.edge_count(),
        percent_in_gcc,
        gcc_node_count: gcc.node_count(),
        gcc_edge_count: gcc.edge_count(),
        degree_out,
        degree_in,
        paths,
        expected_diameter,
        avg_clustering: avg_clustering(&gcc),
        assortativity,
        triad_census: triad_census(&g),
        four_node_census,
        cycles: count_simple_cycles(&g, config.cycle_cap).into(),
        shortcuts: count_shortcut_edges_within(&g, depth),
        consolidated_assets,
        consolidated_wages,
        correlations,
    };
    Ok(ReportOutput {
        report,
        ccdf_out,
        ccdf_in,
    })
}

/// Loads the CSV pair, measures it and, when `out_dir` is given, writes
/// `report.json`, `ccdf_out.tsv` and `ccdf_in.tsv` there.
pub fn run_report(
    nodes_path: &Path,
    edges_path: &Path,
    scope: &NetworkScope,
    config: &ReportConfig,
    out_dir: Option<&Path>,
) -> Result<ReportOutput> {
    let (g, input) = load_network(nodes_path, edges_path)?;
    let out = build_report(&g, input, scope, config)?;
    if let Some(dir) = out_dir {
        write_outputs(dir, &out)?;
    }
    Ok(out)
}

pub fn report_json(report: &NetworkReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report).map_err(|e| Error::Io(e.into()))?;
    s.push('\n');
    Ok(s)
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let tmp = dir.join(format!(
        ".{}.{}.tmp",
        path.file_name()
            .map_or_else(String::new, |f| f.to_string_lossy().into_owned()),
        std::process::id()
    ));
    let result = (|| {
        let mut f = File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result.map_err(|e| Error::Io(e).in_stage("write output"))
}

pub fn write_outputs(dir: &Path, out: &ReportOutput) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(e).in_stage("write output"))?;
    write_atomic(
        &dir.join("report.json"),
        report_json(&out.report)?.as_bytes(),
    )?;
    for (name, table) in [
        ("ccdf_out.tsv", &out.ccdf_out),
        ("ccdf_in.tsv", &out.ccdf_in),
    ] {
        let mut buf = Vec::new();
        table.write_tsv(&mut buf)?;
        write_atomic(&dir.join(name), &buf)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{EdgeRecord, NodeKind, NodeRecord};

    fn quiet() -> ReportConfig {
        ReportConfig {
            bootstrap: 0,
            ..ReportConfig::default()
        }
    }

    #[test]
    fn single_edge_network() {
        let g = build_graph(
            vec![
                NodeRecord::new("A", NodeKind::CCorp),
                NodeRecord::new("B", NodeKind::CCorp),
            ],
            vec![EdgeRecord::new("A", "B")],
        )
        .unwrap();
        let out = build_report(
            &g,
            InputSummary::default(),
            &NetworkScope::entities(),
            &quiet(),
        )
        .unwrap();
        let r = &out.report;
        assert_eq!((r.node_count, r.edge_count), (2, 1));
        assert_eq!(r.paths.value().unwrap().diameter, 1);
        assert!(matches!(r.degree_out.tail.power_law, Outcome::Skipped(_)));
        assert!(matches!(r.degree_in.tail.power_law, Outcome::Skipped(_)));
        assert!(matches!(r.expected_diameter, Outcome::Skipped(_)));
        assert!(matches!(r.assortativity, Outcome::Skipped(_)));
        assert_eq!(r.percent_in_gcc, 100.0);
        let json = report_json(r).unwrap();
        assert!(json.contains("\"skipped\""));
    }

    #[test]
    fn people_only_network_is_empty_in_entity_scope() {
        let g = build_graph(
            vec![
                NodeRecord::new("A", NodeKind::Person),
                NodeRecord::new("B", NodeKind::CCorp),
            ],
            vec![EdgeRecord::new("A", "B")],
        )
        .unwrap();
        let err = build_report(
            &g,
            InputSummary::default(),
            &NetworkScope::entities(),
            &quiet(),
        )
        .unwrap_err();
        assert!(err.is_input_error(), "{err}");
        assert!(err.to_string().starts_with("scope:"));
    }
}
