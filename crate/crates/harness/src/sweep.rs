use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use monocycle::pipeline::{count_bound, full_partition, PipelineParams, Route};
use monocycle::rng::{derive_seed, Purpose};
use monocycle::{color_edges, sample_gnp, ColoredGraph, CycleCover};

use crate::config::{Coloring, ExperimentConfig};
use crate::error::{HarnessError, Result};
use crate::stats::{wilson_interval, Z95};

/// Everything needed to rerun one trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialSetup {
    pub grid_index: usize,
    pub trial: usize,
    pub n: usize,
    pub p: f64,
    pub r: usize,
    pub coloring: Coloring,
    /// Seeds the graph, its colouring and (as `params.seed`) the pipeline.
    pub seed: u64,
    pub params: PipelineParams,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "status")]
pub enum TrialOutcome {
    Success {
        cycles: usize,
        /// `exact`, `monochromatic` or `pipeline`.
        route: String,
        w: Option<usize>,
        u: Option<usize>,
        cover: CycleCover,
    },
    Failure {
        stage: Option<String>,
        kind: String,
        message: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub setup: TrialSetup,
    pub edges: usize,
    pub outcome: TrialOutcome,
    /// `1000 r⁴ ln r`.
    pub bound: f64,
    pub wall_ms: f64,
}

impl ExperimentRecord {
    pub fn cycles(&self) -> Option<usize> {
        match &self.outcome {
            TrialOutcome::Success { cycles, .. } => Some(*cycles),
            TrialOutcome::Failure { .. } => None,
        }
    }

    pub fn within_bound(&self) -> Option<bool> {
        self.cycles().map(|c| c as f64 <= self.bound)
    }

    /// Equal in everything but wall time.
    pub fn same_result(&self, other: &ExperimentRecord) -> bool {
        self.setup == other.setup && self.edges == other.edges && self.outcome == other.outcome
    }
}

/// Per-trial seed, independent of scheduling.
pub(crate) fn trial_seed(master: u64, grid_index: usize, trial: usize) -> u64 {
    derive_seed(master, ((grid_index as u64) << 32) | trial as u64, Purpose::Trial)
}

/// The coloured `G(n, p)` a trial runs on.
pub fn sample_graph(n: usize, p: f64, r: usize, coloring: Coloring, seed: u64) -> monocycle::Result<ColoredGraph> {
    let host = sample_gnp(n, p, derive_seed(seed, 0, Purpose::Graph))?;
    color_edges(&host, r, &coloring.strategy(), derive_seed(seed, 0, Purpose::Coloring))
}

/// Samples the graph for `setup` and partitions it.
pub fn run_trial(setup: &TrialSetup) -> ExperimentRecord {
    let start = Instant::now();
    let mut edges = 0;
    let result = sample_graph(setup.n, setup.p, setup.r, setup.coloring, setup.seed).and_then(|g| {
        edges = g.edge_count();
        full_partition(&g, setup.r, &setup.params)
    });
    let outcome = match result {
        Ok(fp) => {
            let (route, w, u) = match &fp.route {
                Route::Exact => ("exact", None, None),
                Route::Monochromatic => ("monochromatic", None, None),
                Route::Pipeline { plan, .. } => ("pipeline", Some(plan.w), Some(plan.u)),
            };
            TrialOutcome::Success {
                cycles: fp.cover.len(),
                route: route.to_string(),
                w,
                u,
                cover: fp.cover,
            }
        }
        Err(e) => TrialOutcome::Failure {
            stage: e.stage_path(),
            kind: e.kind().to_string(),
            message: e.root().to_string(),
        },
    };
    ExperimentRecord {
        setup: setup.clone(),
        edges,
        outcome,
        bound: count_bound(setup.r),
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

/// Reruns a record from its snapshot.
pub fn replay(record: &ExperimentRecord) -> ExperimentRecord {
    run_trial(&record.setup)
}

/// Trial setups in `(grid index, trial)` order.
pub(crate) fn setups(config: &ExperimentConfig) -> Vec<TrialSetup> {
    config
        .grid()
        .into_iter()
        .flat_map(|pt| {
            (0..config.trials).map(move |trial| {
                let seed = trial_seed(config.seed, pt.index, trial);
                TrialSetup {
                    grid_index: pt.index,
                    trial,
                    n: pt.n,
                    p: pt.p,
                    r: config.r,
                    coloring: config.coloring,
                    seed,
                    params: PipelineParams {
                        seed,
                        ..config.pipeline.clone()
                    },
                }
            })
        })
        .collect()
}

/// One record per `(grid point, trial)`, run concurrently on the current
/// thread pool and returned in `(grid index, trial)` order. Trial failures are
/// recorded, not raised.
pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    config.validate()?;
    let setups = setups(config);
    log::info!(
        "sweep: {} trials over {} grid points",
        setups.len(),
        config.grid().len()
    );
    Ok(setups.par_iter().map(run_trial).collect())
}

/// Runs `f` on a dedicated pool of `workers` threads, or on the current pool
/// when `workers` is `None`.
pub fn in_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(HarnessError::config("the worker count must be positive")),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| HarnessError::config(format!("cannot start {k} workers: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// [`run_sweep`] on `workers` threads.
pub fn run_sweep_with(config: &ExperimentConfig, workers: Option<usize>) -> Result<Vec<ExperimentRecord>> {
    in_pool(workers, || run_sweep(config))?
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    pub grid_index: usize,
    pub n: usize,
    pub p: f64,
    pub trials: usize,
    pub successes: usize,
    /// 95% Wilson interval for the success rate.
    pub wilson: (f64, f64),
    pub within_bound: usize,
    pub mean_cycles: Option<f64>,
    pub max_cycles: Option<usize>,
}

/// Success rates and cycle counts per grid point.
pub fn summarize(records: &[ExperimentRecord]) -> Vec<GridSummary> {
    let mut out: Vec<GridSummary> = Vec::new();
    for rec in records {
        let idx = rec.setup.grid_index;
        let pos = match out.iter().position(|s| s.grid_index == idx) {
            Some(i) => i,
            None => {
                out.push(GridSummary {
                    grid_index: idx,
                    n: rec.setup.n,
                    p: rec.setup.p,
                    trials: 0,
                    successes: 0,
                    wilson: (0.0, 1.0),
                    within_bound: 0,
                    mean_cycles: None,
                    max_cycles: None,
                });
                out.len() - 1
            }
        };
        let s = &mut out[pos];
        s.trials += 1;
        if let Some(c) = rec.cycles() {
            let total = s.mean_cycles.unwrap_or(0.0) * s.successes as f64 + c as f64;
            s.successes += 1;
            s.mean_cycles = Some(total / s.successes as f64);
            s.max_cycles = Some(s.max_cycles.map_or(c, |m| m.max(c)));
            s.within_bound += usize::from(rec.within_bound() == Some(true));
        }
    }
    for s in &mut out {
        s.wilson = wilson_interval(s.successes, s.trials, Z95);
    }
    out.sort_by_key(|s| s.grid_index);
    out
}
