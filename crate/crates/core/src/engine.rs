//! The iterative optimizer: sequential at queue size 1, batched-parallel
//! otherwise.
//!
//! One iteration visits every node in processing order. Nodes are taken in
//! consecutive batches of `queue_size`; all node changes in a batch are
//! computed against the same frozen cover (possibly on several workers) and
//! then applied sequentially in processing order. Queue size alone defines
//! the result; the worker count only changes how fast batches are computed.

use std::time::Instant;

use rayon::prelude::*;

use crate::cover::{initial_clustering, Cover, NodeChange, PostProcess};
use crate::error::Error;
use crate::graph::Graph;
use crate::metric::WccContext;

/// Optimization hyperparameters and execution knobs.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Nodes per batch (q). 1 reproduces the fully sequential algorithm.
    pub queue_size: usize,
    /// Worker threads computing node changes inside a batch.
    pub worker_count: usize,
    /// Stop once the relative score improvement of an iteration drops below
    /// this threshold. Must lie in (0, 1).
    pub wcc_threshold: f64,
    /// Hard iteration cap.
    pub max_iterations: usize,
    /// Whether the caller intends to dump the cover after every iteration
    /// (honored by the CLI via an observer; the engine itself does no I/O).
    pub dump_each_iteration: bool,
    /// Cleanup applied to the final cover.
    pub post_process: PostProcess,
}

impl Default for RunConfig {
    fn default() -> Self {
        let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
        RunConfig {
            queue_size: workers,
            worker_count: workers,
            wcc_threshold: 0.01,
            max_iterations: 100,
            dump_each_iteration: false,
            post_process: PostProcess::None,
        }
    }
}

impl RunConfig {
    /// Sequential configuration with the given threshold.
    pub fn sequential() -> Self {
        RunConfig {
            queue_size: 1,
            worker_count: 1,
            ..RunConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.queue_size < 1 {
            return Err(Error::Config("queue size must be at least 1".into()));
        }
        if self.worker_count < 1 {
            return Err(Error::Config("worker count must be at least 1".into()));
        }
        if !(self.wcc_threshold > 0.0 && self.wcc_threshold < 1.0) {
            return Err(Error::Config(format!(
                "wcc threshold must lie strictly between 0 and 1, got {}",
                self.wcc_threshold
            )));
        }
        if self.max_iterations < 1 {
            return Err(Error::Config("max iterations must be at least 1".into()));
        }
        Ok(())
    }

    /// Non-fatal configuration advisories.
    pub fn warnings(&self) -> Vec<String> {
        let mut warnings = Vec::new();
        if self.worker_count > self.queue_size {
            warnings.push(format!(
                "worker count {} exceeds queue size {}; extra workers will idle",
                self.worker_count, self.queue_size
            ));
        }
        warnings
    }
}

/// Summary of one optimizer iteration.
#[derive(Debug, Clone)]
pub struct IterationRecord {
    /// 1-based iteration index.
    pub iteration: usize,
    /// Running estimator score after the iteration.
    pub wcc: f64,
    /// (wcc_t - wcc_{t-1}) / wcc_{t-1}; the first iteration compares against
    /// the initial clustering's score.
    pub rel_change: f64,
    pub joins: usize,
    pub leaves: usize,
    /// Community count after degenerate removal.
    pub communities: usize,
    pub seconds: f64,
}

/// Full per-iteration trace of a run.
#[derive(Debug, Clone, Default)]
pub struct RunTrace {
    pub initial_wcc: f64,
    pub iterations: Vec<IterationRecord>,
}

impl RunTrace {
    pub fn final_wcc(&self) -> f64 {
        self.iterations.last().map_or(self.initial_wcc, |r| r.wcc)
    }
}

/// Final cover plus the trace that produced it.
pub struct RunResult {
    pub cover: Cover,
    pub trace: RunTrace,
}

fn relative_change(previous: f64, current: f64) -> f64 {
    if previous > 0.0 {
        (current - previous) / previous
    } else if current > previous {
        f64::INFINITY
    } else {
        0.0
    }
}

/// Compute the best join and leave action for one node against a frozen
/// snapshot. Join candidates are the communities of the node's neighbors it
/// is not yet part of; ties are broken toward the lowest community ID.
pub fn compute_node_change(graph: &Graph, cover: &Cover, node: usize) -> NodeChange {
    let ctx = WccContext::new(graph, cover);
    let own = cover.memberships(node);

    let mut candidates = std::collections::BTreeSet::new();
    for &neighbor in graph.neighbors(node) {
        for &community in cover.memberships(neighbor) {
            if !own.contains(&community) {
                candidates.insert(community);
            }
        }
    }
    let mut best_join: Option<(usize, f64)> = None;
    for community in candidates {
        let gain = ctx
            .gain_join(node, community)
            .expect("candidate excludes own communities");
        if gain > 0.0 && best_join.is_none_or(|(_, best)| gain > best) {
            best_join = Some((community, gain));
        }
    }

    let mut best_leave: Option<(usize, f64)> = None;
    for &community in own {
        let gain = ctx.gain_leave(node, community).expect("own membership");
        if gain > 0.0 && best_leave.is_none_or(|(_, best)| gain > best) {
            best_leave = Some((community, gain));
        }
    }

    NodeChange {
        node,
        best_join,
        best_leave,
    }
}

/// Stepwise optimizer state. [`run`] drives it to convergence; tests and
/// long-running callers can call [`Optimizer::iterate`] themselves.
pub struct Optimizer<'g> {
    graph: &'g Graph,
    cover: Cover,
    order: Vec<usize>,
    queue_size: usize,
    pool: Option<rayon::ThreadPool>,
    running_wcc: f64,
    previous_wcc: f64,
    iteration: usize,
}

impl<'g> Optimizer<'g> {
    pub fn new(
        graph: &'g Graph,
        config: &RunConfig,
        initial: Option<Cover>,
    ) -> Result<Self, Error> {
        config.validate()?;
        let order = graph.processing_order();
        let cover = initial.unwrap_or_else(|| initial_clustering(graph, &order));
        let initial_wcc = WccContext::new(graph, &cover).total_score();
        let pool = if config.worker_count > 1 {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(config.worker_count)
                    .build()
                    .map_err(|e| Error::Config(format!("worker pool: {e}")))?,
            )
        } else {
            None
        };
        Ok(Optimizer {
            graph,
            cover,
            order,
            queue_size: config.queue_size,
            pool,
            running_wcc: initial_wcc,
            previous_wcc: initial_wcc,
            iteration: 0,
        })
    }

    pub fn cover(&self) -> &Cover {
        &self.cover
    }

    pub fn into_cover(self) -> Cover {
        self.cover
    }

    /// Running estimator score, maintained from actual apply-time deltas.
    pub fn running_wcc(&self) -> f64 {
        self.running_wcc
    }

    pub fn iterations_done(&self) -> usize {
        self.iteration
    }

    /// Run one full iteration: batched change computation, sequential apply
    /// in processing order, then degenerate-community removal.
    pub fn iterate(&mut self) -> IterationRecord {
        let started = Instant::now();
        let mut joins = 0usize;
        let mut leaves = 0usize;
        for batch in self.order.chunks(self.queue_size) {
            let graph = self.graph;
            let cover = &self.cover;
            let changes: Vec<NodeChange> = match &self.pool {
                Some(pool) => pool.install(|| {
                    batch
                        .par_iter()
                        .map(|&node| compute_node_change(graph, cover, node))
                        .collect()
                }),
                None => batch
                    .iter()
                    .map(|&node| compute_node_change(graph, cover, node))
                    .collect(),
            };
            for change in &changes {
                let applied = self.cover.apply_change(self.graph, change);
                self.running_wcc += applied.delta;
                joins += applied.joined as usize;
                leaves += applied.left as usize;
            }
        }
        self.cover.remove_degenerate();
        self.iteration += 1;
        let record = IterationRecord {
            iteration: self.iteration,
            wcc: self.running_wcc,
            rel_change: relative_change(self.previous_wcc, self.running_wcc),
            joins,
            leaves,
            communities: self.cover.community_count(),
            seconds: started.elapsed().as_secs_f64(),
        };
        self.previous_wcc = self.running_wcc;
        record
    }
}

/// Optimize to convergence: iterate until the relative improvement falls
/// below the threshold (a worsening iteration also stops) or the iteration
/// cap is hit, then apply the configured post-processing.
pub fn run(graph: &Graph, config: &RunConfig, initial: Option<Cover>) -> Result<RunResult, Error> {
    run_with_observer(graph, config, initial, |_, _| Ok(()))
}

/// [`run`] with a callback invoked after every iteration (degenerate
/// communities already removed). The CLI uses this for per-iteration dumps.
pub fn run_with_observer<F>(
    graph: &Graph,
    config: &RunConfig,
    initial: Option<Cover>,
    mut observer: F,
) -> Result<RunResult, Error>
where
    F: FnMut(usize, &Cover) -> Result<(), Error>,
{
    let mut optimizer = Optimizer::new(graph, config, initial)?;
    let initial_wcc = optimizer.running_wcc();
    let mut iterations = Vec::new();
    for _ in 0..config.max_iterations {
        let record = optimizer.iterate();
        observer(record.iteration, optimizer.cover())?;
        let stop = record.rel_change < config.wcc_threshold;
        iterations.push(record);
        if stop {
            break;
        }
    }
    let mut cover = optimizer.into_cover();
    cover.post_process(config.post_process);
    Ok(RunResult {
        cover,
        trace: RunTrace {
            initial_wcc,
            iterations,
        },
    })
}

/// One benchmark measurement: a full run under one configuration.
#[derive(Debug, Clone)]
pub struct BenchmarkRow {
    pub worker_count: usize,
    pub queue_size: usize,
    pub seconds: f64,
    /// Wall time relative to the first configuration in the list.
    pub ratio_to_baseline: f64,
    pub iterations: usize,
    pub final_wcc: f64,
    pub per_iteration_seconds: Vec<f64>,
}

/// Time a full run per configuration without any output writing. The first
/// configuration is the baseline for the reported ratios.
pub fn benchmark(graph: &Graph, configs: &[RunConfig]) -> Result<Vec<BenchmarkRow>, Error> {
    let mut rows: Vec<BenchmarkRow> = Vec::with_capacity(configs.len());
    for config in configs {
        let started = Instant::now();
        let result = run(graph, config, None)?;
        let seconds = started.elapsed().as_secs_f64();
        let baseline = rows.first().map_or(seconds, |row| row.seconds);
        rows.push(BenchmarkRow {
            worker_count: config.worker_count,
            queue_size: config.queue_size,
            seconds,
            ratio_to_baseline: if baseline > 0.0 { seconds / baseline } else { 1.0 },
            iterations: result.trace.iterations.len(),
            final_wcc: result.trace.final_wcc(),
            per_iteration_seconds: result
                .trace
                .iterations
                .iter()
                .map(|r| r.seconds)
                .collect(),
        });
    }
    Ok(rows)
}
