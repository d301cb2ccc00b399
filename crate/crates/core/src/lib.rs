//! Overlapping community detection for undirected graphs.
//!
//! Communities are optimized through per-node join/leave moves scored by a
//! triangle-density estimator of the weighted community clustering metric.
//! Moves are evaluated either strictly sequentially (queue size 1) or in
//! batches of q nodes against a frozen snapshot, which parallellizes cleanly
//! while keeping results a function of q alone.
//!
//! The crate ships the preprocessing pipeline (edge-list parsing, dense
//! relabeling, triangle counting), the optimizer, cover file I/O, evaluation
//! metrics (overlapping F1, ONMI distance) and a benchmark harness; the
//! `owcc` binary exposes all of it as subcommands.

pub mod cli;
pub mod cover;
pub mod engine;
pub mod error;
pub mod evaluate;
pub mod graph;
pub mod metric;

pub use cover::{initial_clustering, Community, Cover, NodeChange, PostProcess};
pub use engine::{
    benchmark, compute_node_change, run, run_with_observer, BenchmarkRow, IterationRecord,
    Optimizer, RunConfig, RunResult, RunTrace,
};
pub use error::Error;
pub use evaluate::{
    cover_stats, f1_overlapping, onmi_distance, onmi_distance_one_sided, CoverStats,
};
pub use graph::{build_graph, parse_edge_list, read_graph, Graph, RawEdgeList};
pub use metric::{exact_node_score, exact_total_score, WccContext};
