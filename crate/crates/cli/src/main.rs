use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use monocycle::absorption::{absorb_pipeline_with, AbsorbOptions, AbsorptionParams};
use monocycle::allocation::{allocate_cycles_with, AllocationMode};
use monocycle::pipeline::{estimate_p, full_partition, partition_pipeline, PipelineParams};
use monocycle::prob::{check_pair_density, check_triple_sums, find_bad_set};
use monocycle::reduced::{perfect_matching, ReducedGraph};
use monocycle::solver::{min_mono_cycle_partition, SolveBudget};
use monocycle::{verify_partition, ColoredGraph, VertexSet};
use monocycle_harness::{
    estimate_threshold, in_pool, run_sweep, sample_graph, summarize, write_outputs, Coloring, ExperimentConfig,
    ThresholdOptions,
};

const WORKERS_ENV: &str = "MONOCYCLE_WORKERS";

/// Monochromatic cycle partitions of edge-coloured graphs.
///
/// Graph files are colour edge lists: a header `n r`, then one `u v c` line
/// per edge (vertices from 0, colours from 1). Vertex set files list vertex
/// ids separated by whitespace. Results are printed as JSON.
#[derive(Parser)]
#[command(name = "monocycle", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimum monochromatic cycle partition of a small graph.
    Solve {
        #[arg(long)]
        graph: PathBuf,
        /// Largest vertex count to attempt.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Density checks on a graph.
    Check {
        #[command(subcommand)]
        check: Check,
    },
    /// Cover `W` with monochromatic cycles using reservoir `U`.
    Absorb {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long = "U", value_name = "FILE")]
        u: PathBuf,
        #[arg(long = "W", value_name = "FILE")]
        w: PathBuf,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Edge probability; estimated from the graph when absent.
        #[arg(long)]
        p: Option<f64>,
        /// Use the literal constants and fail on unmet preconditions.
        #[arg(long)]
        strict: bool,
    },
    /// Allocate cycles on a reduced graph.
    Allocate {
        /// Reduced graph, optionally followed by a `matching:` section.
        #[arg(long)]
        reduced: PathBuf,
        /// Cluster sizes, whitespace separated.
        #[arg(long)]
        sizes: PathBuf,
        #[arg(long)]
        m: usize,
        /// Skip the numeric preconditions (the result is still verified).
        #[arg(long)]
        relaxed: bool,
    },
    /// Build the partition plan and partition everything outside `W`.
    Pipeline(PipelineArgs),
    /// Partition the whole graph.
    Partition(PipelineArgs),
    /// Run an experiment sweep from a JSON config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, env = WORKERS_ENV)]
        workers: Option<usize>,
    },
    /// Estimate the edge probability at which half the trials need at most
    /// `target` cycles.
    Threshold {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        target: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.01)]
        lo: f64,
        #[arg(long, default_value_t = 1.0)]
        hi: f64,
        #[arg(long, default_value_t = 8)]
        iterations: usize,
        #[arg(long, value_enum, default_value_t = ColoringArg::UniformRandom)]
        coloring: ColoringArg,
        #[arg(long, env = WORKERS_ENV)]
        workers: Option<usize>,
    },
    /// Write a random coloured graph; the same seed gives the graph of the
    /// sweep trial with that seed.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ColoringArg::UniformRandom)]
        coloring: ColoringArg,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Check {
    /// `e(X, Y)` against `p|X||Y|`.
    PairDensity {
        #[command(flatten)]
        common: CheckArgs,
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
    },
    /// Sum of common neighbourhoods of vertex pairs inside `Y`.
    Triples {
        #[command(flatten)]
        common: CheckArgs,
        /// One `u v` pair per line.
        #[arg(long)]
        pairs: PathBuf,
        #[arg(long)]
        y: PathBuf,
    },
    /// `k`-sets of vertices with atypical common neighbourhoods in `X`.
    BadSet {
        #[command(flatten)]
        common: CheckArgs,
        #[arg(long)]
        x: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
    },
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Edge probability; estimated from the graph when absent.
    #[arg(long)]
    p: Option<f64>,
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    r: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// JSON file with pipeline settings; missing fields take defaults.
    #[arg(long)]
    params: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ColoringArg {
    UniformRandom,
    RoundRobin,
}

impl From<ColoringArg> for Coloring {
    fn from(c: ColoringArg) -> Self {
        match c {
            ColoringArg::UniformRandom => Coloring::UniformRandom,
            ColoringArg::RoundRobin => Coloring::RoundRobin,
        }
    }
}

fn read_graph(path: &Path) -> Result<ColoredGraph> {
    ColoredGraph::read(path).with_context(|| format!("reading graph {}", path.display()))
}

fn read_set(path: &Path, n: usize) -> Result<VertexSet> {
    VertexSet::read(path, n).with_context(|| format!("reading vertex set {}", path.display()))
}

fn read_numbers(path: &Path) -> Result<Vec<usize>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace)
        .map(|t| {
            t.parse()
                .with_context(|| format!("bad number `{t}` in {}", path.display()))
        })
        .collect()
}

fn probability(g: &ColoredGraph, p: Option<f64>) -> Result<f64> {
    match p {
        Some(p) => Ok(p),
        None => Ok(estimate_p(g)?),
    }
}

fn pipeline_params(args: &PipelineArgs) -> Result<PipelineParams> {
    let mut params: PipelineParams = match &args.params {
        Some(path) => serde_json::from_str(&fs::read_to_string(path)?)
            .with_context(|| format!("parsing pipeline settings {}", path.display()))?,
        None => PipelineParams::default(),
    };
    if let Some(seed) = args.seed {
        params.seed = seed;
    }
    params.validate()?;
    Ok(params)
}

fn print(value: &impl Serialize) -> Result<()> {
    writeln!(io::stdout().lock(), "{}", serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn bound(claimed: f64, achieved: usize) -> Value {
    json!({ "claimed": claimed, "achieved": achieved, "holds": achieved as f64 <= claimed })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve { graph, budget } => {
            let g = read_graph(&graph)?;
            let budget = budget.map_or_else(SolveBudget::default, SolveBudget::with_max_vertices);
            let sol = min_mono_cycle_partition(&g, &budget)?;
            print(&json!({ "optimum": sol.count, "nodes": sol.nodes, "cover": sol.cover }))
        }
        Command::Check { check } => match check {
            Check::PairDensity { common, x, y, alpha } => {
                let g = read_graph(&common.graph)?;
                let p = probability(&g, common.p)?;
                let (x, y) = (read_set(&x, g.n())?, read_set(&y, g.n())?);
                print(&check_pair_density(&g, &x, &y, p, alpha)?)
            }
            Check::Triples { common, pairs, y } => {
                let g = read_graph(&common.graph)?;
                let p = probability(&g, common.p)?;
                let nums = read_numbers(&pairs)?;
                if nums.len() % 2 == 1 {
                    bail!("{} holds an odd number of vertex ids", pairs.display());
                }
                let pairs: Vec<(usize, usize)> = nums.chunks(2).map(|c| (c[0], c[1])).collect();
                print(&check_triple_sums(&g, &pairs, &read_set(&y, g.n())?, p)?)
            }
            Check::BadSet { common, x, k, alpha } => {
                let g = read_graph(&common.graph)?;
                let p = probability(&g, common.p)?;
                print(&find_bad_set(&g, &read_set(&x, g.n())?, k, alpha, p)?)
            }
        },
        Command::Absorb {
            graph,
            u,
            w,
            beta,
            seed,
            p,
            strict,
        } => {
            let g = read_graph(&graph)?;
            let (u, w) = (read_set(&u, g.n())?, read_set(&w, g.n())?);
            let params = AbsorptionParams::new(g.r(), beta, probability(&g, p)?)?;
            let base = if strict {
                AbsorbOptions::strict()
            } else {
                AbsorbOptions::default()
            };
            let opts = AbsorbOptions { seed, ..base };
            let out = absorb_pipeline_with(&g, &u, &w, &params, &opts)?;
            let rep = &out.report;
            print(&json!({
                "cover": out.cover,
                "report": rep,
                "bounds": {
                    "cycles": bound(rep.count_bound, rep.cycles),
                    "spill": bound(rep.spill_bound, rep.spill),
                },
            }))
        }
        Command::Allocate {
            reduced,
            sizes,
            m,
            relaxed,
        } => {
            let mut rg = ReducedGraph::read(&reduced).with_context(|| format!("reading {}", reduced.display()))?;
            if rg.matching().is_none() {
                let matching = perfect_matching(&rg)?;
                rg.set_matching(matching)?;
            }
            let x = read_numbers(&sizes)?;
            let mode = if relaxed {
                AllocationMode::Relaxed
            } else {
                AllocationMode::Strict
            };
            let alloc = allocate_cycles_with(&rg, &x, m, mode)?;
            let problems = alloc.verify(&rg, &x, m);
            print(&json!({ "allocation": alloc, "matching": rg.matching(), "problems": problems }))
        }
        Command::Pipeline(args) => {
            let g = read_graph(&args.graph)?;
            let params = pipeline_params(&args)?;
            let plan = partition_pipeline(&g, args.r, &params)?;
            let empty = VertexSet::empty();
            let (cover, closure) = plan.partition(&g, &empty, &empty)?;
            print(&json!({
                "plan": plan.report,
                "u": plan.u,
                "w": plan.w,
                "cover": cover,
                "closure": closure,
            }))
        }
        Command::Partition(args) => {
            let g = read_graph(&args.graph)?;
            let params = pipeline_params(&args)?;
            let fp = full_partition(&g, args.r, &params)?;
            let check = verify_partition(&g, &fp.cover);
            print(&json!({
                "cycles": fp.cover.len(),
                "bound": fp.bound,
                "valid": check.valid,
                "route": fp.route,
                "cover": fp.cover,
            }))
        }
        Command::Sweep { config, out, workers } => {
            let text = fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let cfg = ExperimentConfig::from_json(&text)?;
            let records = in_pool(workers, || run_sweep(&cfg))??;
            let paths = write_outputs(&out, &records)?;
            print(&json!({
                "records": records.len(),
                "failures": records.iter().filter(|r| r.cycles().is_none()).count(),
                "csv": paths.csv,
                "json": paths.json,
                "summary": summarize(&records),
            }))
        }
        Command::Threshold {
            n,
            r,
            target,
            trials,
            seed,
            lo,
            hi,
            iterations,
            coloring,
            workers,
        } => {
            let opts = ThresholdOptions {
                lo,
                hi,
                iterations,
                coloring: coloring.into(),
                ..ThresholdOptions::default()
            };
            print(&in_pool(workers, || {
                estimate_threshold(n, r, target, trials, seed, &opts)
            })??)
        }
        Command::Sample {
            n,
            p,
            r,
            seed,
            coloring,
            out,
        } => {
            let text = sample_graph(n, p, r, coloring.into(), seed)?.to_edge_list();
            match out {
                Some(path) => fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
                None => io::stdout().lock().write_all(text.as_bytes())?,
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        // Output piped into `head` and the like.
        Err(e)
            if e.downcast_ref::<io::Error>()
                .is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) =>
        {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
