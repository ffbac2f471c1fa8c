use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use capnet::components::industry_subnetwork;
use capnet::consolidation::SharePolicy;
use capnet::degree::{degree_sequences, DegreeSample};
use capnet::ingest::{filter_network, write_edges_csv, write_nodes_csv, NetworkScope};
use capnet::motifs::{
    count_shortcut_edges_within, count_simple_cycles, four_node_census_with, triad_census,
    CensusMode,
};
use capnet::paths::{avg_clustering, degree_assortativity, path_stats, PathMode};
use capnet::powerlaw::XminMode;
use capnet::report::{analyze_tail, load_network, run_report, write_atomic, Outcome, ReportConfig};
use capnet::synth::{gen_directed_scale_free, with_synthetic_attributes, ScaleFreeParams};
use capnet::{seed, Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "capnet",
    version,
    about = "Measure directed ownership networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full measurement suite; writes report.json and the CCDF tables.
    Report {
        #[command(flatten)]
        net: NetArgs,
        #[command(flatten)]
        est: EstArgs,
        #[command(flatten)]
        paths: PathArgs,
        #[arg(long, value_enum, default_value_t = Policy::EqualSplit)]
        share_policy: Policy,
        /// Output directory. Without it the report goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Power-law fit of a one-column file of positive integers.
    Fit {
        input: PathBuf,
        #[command(flatten)]
        est: EstArgs,
        /// Fix the lower cutoff instead of scanning.
        #[arg(long)]
        xmin: Option<u64>,
    },
    /// Triad and 4-node censuses, cycles and shortcut edges.
    Motifs {
        #[command(flatten)]
        net: NetArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Drop the three-parents-one-child class from the 4-node shares.
        #[arg(long)]
        exclude_funnel: bool,
        #[arg(long, default_value_t = capnet::motifs::DEFAULT_CYCLE_CAP)]
        cycle_cap: u64,
        /// Bound shortcut searches to paths of at most this many edges.
        #[arg(long)]
        shortcut_depth: Option<u32>,
    },
    /// Shortest-path statistics, clustering and assortativity.
    Paths {
        #[command(flatten)]
        net: NetArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        paths: PathArgs,
    },
    /// Emit a synthetic scale-free network as nodes.csv and edges.csv.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        n_edges: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Probability that a step adds a new parent node.
        #[arg(long, default_value_t = 0.4)]
        p_new_source: f64,
        /// Probability that a step adds a new child node.
        #[arg(long, default_value_t = 0.1)]
        p_new_target: f64,
        #[arg(long, default_value_t = 1.06)]
        offset_in: f64,
        #[arg(long, default_value_t = 1.0)]
        offset_out: f64,
    },
    /// Degree analysis of the links touching one NAICS prefix.
    Industry {
        #[command(flatten)]
        net: NetArgs,
        #[command(flatten)]
        est: EstArgs,
        #[arg(long)]
        naics: String,
        /// Output directory for industry_<prefix>.json. Without it, stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct NetArgs {
    #[arg(long)]
    nodes: PathBuf,
    #[arg(long)]
    edges: PathBuf,
    #[arg(long, default_value = "entities", value_parser = ["entities", "all", "no-fire"])]
    scope: String,
    /// Restrict to the giant weakly connected component.
    #[arg(long)]
    gcc_only: bool,
}

impl NetArgs {
    fn scope(&self) -> NetworkScope {
        NetworkScope::from_name(&self.scope)
            .expect("validated by clap")
            .with_gcc_only(self.gcc_only)
    }
}

#[derive(Args)]
struct EstArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Bootstrap replicates; 0 skips the interval.
    #[arg(long, default_value_t = 1000)]
    bootstrap: usize,
    /// Goodness-of-fit simulations; 0 skips the test.
    #[arg(long, default_value_t = 0)]
    gof_sims: usize,
}

#[derive(Args)]
struct PathArgs {
    /// Largest component handled with exact all-source searches.
    #[arg(long, default_value_t = capnet::paths::DEFAULT_EXACT_CAP)]
    exact_paths_cap: usize,
    /// BFS sources used above the exact cap.
    #[arg(long, default_value_t = capnet::paths::DEFAULT_SAMPLE_SOURCES)]
    sample_sources: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    EqualSplit,
    Skip,
}

impl EstArgs {
    fn config(&self) -> ReportConfig {
        ReportConfig {
            seed: self.seed,
            bootstrap: self.bootstrap,
            gof_sims: self.gof_sims,
            ..ReportConfig::default()
        }
    }
}

fn emit(value: &serde_json::Value) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Error::Io(e.into()))?;
    writeln!(out)?;
    Ok(())
}

fn read_sample(path: &Path) -> Result<DegreeSample> {
    let reader = BufReader::new(File::open(path)?);
    let mut values = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let field = line.trim();
        if field.is_empty() || field.starts_with('#') {
            continue;
        }
        match field.parse::<u64>() {
            Ok(0) => {}
            Ok(v) => values.push(v),
            // a non-numeric first line is a header
            Err(_) if i == 0 => {}
            Err(e) => {
                return Err(Error::InvalidField {
                    row: i as u64 + 1,
                    field: "value",
                    message: e.to_string(),
                })
            }
        }
    }
    Ok(DegreeSample::new(values))
}

fn load_scoped(net: &NetArgs) -> Result<capnet::EntityGraph> {
    let (g, _) = load_network(&net.nodes, &net.edges)?;
    filter_network(&g, &net.scope()).map_err(|e| e.in_stage("scope"))
}

fn tail_failure(o: &Outcome<capnet::powerlaw::PowerLawFit>) -> Option<Error> {
    match o {
        Outcome::Skipped(reason) => Some(Error::EstimationUnreliable(reason.clone())),
        Outcome::Value(_) => None,
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Report {
            net,
            est,
            paths,
            share_policy,
            out,
        } => {
            let config = ReportConfig {
                share_policy: match share_policy {
                    Policy::EqualSplit => SharePolicy::EqualSplit,
                    Policy::Skip => SharePolicy::Skip,
                },
                exact_paths_cap: paths.exact_paths_cap,
                sample_sources: paths.sample_sources,
                ..est.config()
            };
            let result = run_report(
                &net.nodes,
                &net.edges,
                &net.scope(),
                &config,
                out.as_deref(),
            )?;
            match out {
                Some(dir) => eprintln!("wrote {}", dir.join("report.json").display()),
                None => print!("{}", capnet::report::report_json(&result.report)?),
            }
        }
        Command::Fit { input, est, xmin } => {
            let sample = read_sample(&input).map_err(|e| e.in_stage("read sample"))?;
            let config = ReportConfig {
                xmin: xmin.map_or(XminMode::ScanAll, XminMode::Fixed),
                ..est.config()
            };
            let tail = analyze_tail(
                &sample,
                &config,
                seed::derive(est.seed, seed::stream::DIRECTION, 0),
            );
            emit(&json!({ "input": input.file_name().map(|f| f.to_string_lossy()), "fit": tail }))?;
            if let Some(e) = tail_failure(&tail.power_law) {
                return Err(e.in_stage("power-law fit"));
            }
        }
        Command::Motifs {
            net,
            seed,
            exclude_funnel,
            cycle_cap,
            shortcut_depth,
        } => {
            let g = load_scoped(&net)?;
            let mode = CensusMode::Auto {
                budget: capnet::motifs::DEFAULT_BUDGET,
                target: capnet::motifs::DEFAULT_SAMPLE_TARGET,
                seed,
            };
            let quads: Outcome<_> = four_node_census_with(&g, exclude_funnel, mode).into();
            let cycles: Outcome<_> = count_simple_cycles(&g, cycle_cap).into();
            emit(&json!({
                "node_count": g.node_count(),
                "edge_count": g.edge_count(),
                "triad_census": triad_census(&g),
                "four_node_census": quads,
                "cycles": cycles,
                "shortcuts": count_shortcut_edges_within(&g, shortcut_depth),
            }))?;
        }
        Command::Paths { net, seed, paths } => {
            let g = load_scoped(&net)?;
            let gcc =
                capnet::components::extract_gcc(&g).map_err(|e| e.in_stage("giant component"))?;
            let mode = PathMode::Auto {
                exact_cap: paths.exact_paths_cap,
                sources: paths.sample_sources,
                seed,
            };
            let stats = path_stats(&gcc.graph, mode).map_err(|e| e.in_stage("paths"))?;
            let assort: Outcome<Option<f64>> = degree_assortativity(&g).into();
            emit(&json!({
                "node_count": g.node_count(),
                "gcc_node_count": gcc.graph.node_count(),
                "paths": stats,
                "avg_clustering": avg_clustering(&gcc.graph),
                "assortativity": assort,
            }))?;
        }
        Command::Synth {
            out,
            n_edges,
            seed,
            p_new_source,
            p_new_target,
            offset_in,
            offset_out,
        } => {
            let params = ScaleFreeParams {
                n_edges,
                p_new_source,
                p_new_target,
                offset_in,
                offset_out,
            };
            let g = gen_directed_scale_free(params, seed)?;
            let g = with_synthetic_attributes(&g, seed);
            let (nodes, edges) = g.to_records();
            std::fs::create_dir_all(&out)?;
            let mut buf = Vec::new();
            write_nodes_csv(&mut buf, &nodes)?;
            write_atomic(&out.join("nodes.csv"), &buf)?;
            let mut buf = Vec::new();
            write_edges_csv(&mut buf, &edges)?;
            write_atomic(&out.join("edges.csv"), &buf)?;
            eprintln!(
                "wrote {} nodes and {} edges to {} (predicted in-exponent {:.3}, out-exponent {:.3})",
                nodes.len(),
                edges.len(),
                out.display(),
                params.predicted_in_exponent(),
                params.predicted_out_exponent()
            );
        }
        Command::Industry {
            net,
            est,
            naics,
            out,
        } => {
            let g = load_scoped(&net)?;
            let sub =
                industry_subnetwork(&g, &naics).map_err(|e| e.in_stage("industry subnetwork"))?;
            let config = est.config();
            let (out_deg, in_deg) =
                degree_sequences(&sub.graph).map_err(|e| e.in_stage("degrees"))?;
            let degree_out = analyze_tail(
                &out_deg,
                &config,
                seed::derive(est.seed, seed::stream::DIRECTION, 0),
            );
            let degree_in = analyze_tail(
                &in_deg,
                &config,
                seed::derive(est.seed, seed::stream::DIRECTION, 1),
            );
            let value = json!({
                "naics": naics,
                "scope": net.scope(),
                "config": config,
                "node_count": sub.graph.node_count(),
                "edge_count": sub.graph.edge_count(),
                "match_fraction": sub.match_fraction,
                "degree_out": degree_out,
                "degree_in": degree_in,
            });
            match out {
                Some(dir) => {
                    std::fs::create_dir_all(&dir)?;
                    let mut text =
                        serde_json::to_string_pretty(&value).map_err(|e| Error::Io(e.into()))?;
                    text.push('\n');
                    let path = dir.join(format!("industry_{naics}.json"));
                    write_atomic(&path, text.as_bytes())?;
                    eprintln!("wrote {}", path.display());
                }
                None => emit(&value)?,
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_input_error() {
                ExitCode::from(2)
            } else if e.is_estimation_error() {
                ExitCode::from(3)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
