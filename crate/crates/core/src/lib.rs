//! Estimate the largest (and second largest) adjacency-matrix eigenvalues
//! of large undirected graphs from closed-walk observations along a simple
//! random walk, under a neighbor-query budget.
//!
//! The crate has four parts:
//!
//! * [`graph`] — CSR graphs loaded from SNAP-style edge lists, plus the
//!   query-metered access views (full and restricted).
//! * [`walker`] — the random walk itself: window of recent positions,
//!   degree-sum estimator, budget-aware stepping.
//! * [`estimators`] — the closed-walk sampling estimators, the k-selection
//!   rule, trace-based lambda2 / top-n extraction, and CI diagnostics.
//! * [`oracle`] — exact reference computations (brute-force walk counts,
//!   dense Jacobi spectra, shifted power iteration with deflation).
//!
//! [`harness`] reproduces the benchmark protocol (repeated seeded runs at
//! fixed query budgets, relative error and NRMSE tables); [`gen`] provides
//! deterministic graph constructions for tests and benchmarks.

pub mod estimators;
pub mod gen;
pub mod graph;
pub mod harness;
pub mod oracle;
pub mod walker;

pub use estimators::{
    choose_k, cwalker_a, cwalker_b, cwalker_c, lambda2_from_traces, naive_lambda1,
    top_n_iterative, top_n_sampled, variance_and_ci, Algorithm, Diagnostics,
    EstimateError, EstimateReport,
};
pub use graph::{
    load_edge_list, FullAccess, Graph, GraphAccess, GraphError, LoadSummary, NodeId,
    QueryLedger, RestrictedAccess,
};
pub use harness::{ExperimentPlan, HarnessError, MetricRow};
pub use oracle::{
    brute_force_closed_walks, dense_spectrum, dense_trace_power, power_iteration_top2,
    Spectrum, SpectrumMethod,
};
pub use walker::{StartNode, WalkConfig, WalkError};

/// Toolkit version string embedded in every structured output.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
