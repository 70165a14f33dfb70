//! Shared helpers for the integration suites: literal walk-probability
//! enumeration (the analytic expectation of each estimator's per-step
//! increment) and dataset discovery for the SNAP-based criteria.

#![allow(dead_code)]

use std::path::PathBuf;

use cwalker_core::graph::{Graph, NodeId};

/// Enumerate every node sequence of `len` nodes reachable by a walk and
/// fold `term(sequence)` weighted by the literal stationary walk
/// probability d(x1)/D * prod 1/d(x_i..) from the transition rule.
fn fold_walks(g: &Graph, len: usize, mut term: impl FnMut(&[NodeId]) -> f64) -> f64 {
    let d_total = g.degree_sum() as f64;
    let mut seq: Vec<NodeId> = Vec::with_capacity(len);
    let mut acc = 0.0;
    fn rec(
        g: &Graph,
        seq: &mut Vec<NodeId>,
        len: usize,
        prob: f64,
        acc: &mut f64,
        term: &mut impl FnMut(&[NodeId]) -> f64,
    ) {
        if seq.len() == len {
            *acc += prob * term(seq);
            return;
        }
        let last = *seq.last().expect("nonempty");
        let d = g.degree(last) as f64;
        for &u in g.neighbors(last) {
            seq.push(u);
            rec(g, seq, len, prob / d, acc, term);
            seq.pop();
        }
    }
    for start in 0..g.node_count() as NodeId {
        let start_prob = g.degree(start) as f64 / d_total;
        seq.push(start);
        rec(g, &mut seq, len, start_prob, &mut acc, &mut term);
        seq.pop();
    }
    acc
}

fn interior_degree_product(g: &Graph, seq: &[NodeId]) -> f64 {
    seq[1..seq.len() - 1].iter().map(|&v| g.degree(v) as f64).product()
}

/// Analytic E[increment] * D for the traversal (naive) estimator at k:
/// sequences of k+1 nodes, indicator x1 == x_{k+1}, weight = product of
/// interior degrees.
pub fn naive_expectation_times_d(g: &Graph, k: usize) -> f64 {
    let d_total = g.degree_sum() as f64;
    d_total
        * fold_walks(g, k + 1, |seq| {
            if seq[0] == seq[k] {
                interior_degree_product(g, seq)
            } else {
                0.0
            }
        })
}

/// Analytic E[increment] * D for the neighbor-membership estimator at k:
/// sequences of k nodes (a walk of length k-1), indicator x1 in N(x_k),
/// weight = product of interior degrees.
pub fn membership_expectation_times_d(g: &Graph, k: usize) -> f64 {
    let d_total = g.degree_sum() as f64;
    d_total
        * fold_walks(g, k, |seq| {
            if g.contains_neighbor(seq[seq.len() - 1], seq[0]).unwrap() {
                interior_degree_product(g, seq)
            } else {
                0.0
            }
        })
}

/// Analytic E[increment] * D for the common-neighbor estimator at k:
/// sequences of k-1 nodes (a walk of length k-2), weight = common-neighbor
/// count of the endpoints times the product of interior degrees.
pub fn common_neighbor_expectation_times_d(g: &Graph, k: usize) -> f64 {
    let d_total = g.degree_sum() as f64;
    d_total
        * fold_walks(g, k - 1, |seq| {
            let inter =
                g.common_neighbor_count(seq[0], seq[seq.len() - 1]).unwrap() as f64;
            inter * interior_degree_product(g, seq)
        })
}

/// Locate a SNAP dataset: $CWALKER_DATA_DIR, then <workspace>/data.
pub fn snap_dataset(name: &str) -> Option<PathBuf> {
    let mut candidates = Vec::new();
    if let Ok(dir) = std::env::var("CWALKER_DATA_DIR") {
        candidates.push(PathBuf::from(dir).join(name));
    }
    let workspace = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..");
    candidates.push(workspace.join("data").join(name));
    candidates.into_iter().find(|p| p.is_file())
}

/// One pass/fail/skip line per acceptance criterion, visible under
/// `cargo test -- --nocapture`.
pub fn criterion_line(id: &str, status: &str, detail: &str) {
    println!("criterion {id}: {status} — {detail}");
}
