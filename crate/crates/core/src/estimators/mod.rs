//! Eigenvalue estimators driven by closed-walk observations along a simple
//! random walk: the naive traversal check, the neighbor-membership variant
//! (given k, and with automatic k selection), the common-neighbor variant
//! that also returns lambda2, plus the trace-based top-n recurrences and
//! per-run variance diagnostics.

mod counters;
mod diagnostics;
mod sampling;
mod selection;

pub use counters::{ClosedWalkCounters, WalkCounter};
pub use diagnostics::{variance_and_ci, Diagnostics, Welford};
pub use sampling::{cwalker_a, cwalker_b, cwalker_c, naive_lambda1, top_n_sampled};
pub use selection::{
    choose_k, clamp_alpha, lambda2_from_traces, top_n_iterative, KChoice, SelectionError,
    ALPHA_CLAMP_MAX, ALPHA_CLAMP_MIN, K_PRIME_FLOOR,
};

use serde::{Deserialize, Serialize};

use crate::walker::WalkError;

/// Which estimator produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Naive,
    A,
    B,
    C,
    TopN,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Algorithm::Naive => "naive",
            Algorithm::A => "a",
            Algorithm::B => "b",
            Algorithm::C => "c",
            Algorithm::TopN => "topn",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "naive" => Ok(Algorithm::Naive),
            "a" => Ok(Algorithm::A),
            "b" => Ok(Algorithm::B),
            "c" => Ok(Algorithm::C),
            "topn" => Ok(Algorithm::TopN),
            other => Err(format!("unknown algorithm {other:?} (naive|a|b|c|topn)")),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EstimateError {
    #[error("invalid estimator config: {0}")]
    Config(String),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error("no closed walks of length {k} observed; estimate undefined")]
    NoClosedWalks { k: usize },
    #[error("no closed walks observed at any length; estimation failed")]
    AllKMissing,
}

/// Everything one estimator run produced.
///
/// `lambda1` always equals `lambda1_by_k[k_prime]`. Entries of the per-k
/// arrays are None below the algorithm's k range and at lengths whose
/// counter stayed zero (a zero counter means the estimate is undefined,
/// not zero).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub algorithm: Algorithm,
    /// Node count of the walked graph.
    pub n: usize,
    pub seed: u64,
    /// Configured walk length m (draws, burn-in included).
    pub walk_length: u64,
    /// Burn-in t.
    pub burn_in: u64,
    /// Fixed closed-walk length (naive / given-k variants).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Maximum closed-walk length K (adaptive variants).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    pub k_prime: usize,
    pub lambda1: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda2: Option<f64>,
    /// Descending estimates from the iterative top-n recurrence.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub top_eigenvalues: Option<Vec<f64>>,
    pub d_est: f64,
    pub queries_used: u64,
    /// Draws actually taken (equals walk_length unless the budget ran out).
    pub walk_steps: u64,
    pub counted_steps: u64,
    /// Budget ran out before walk_length draws.
    pub incomplete: bool,
    /// lambda1[k'] was undefined and the nearest defined k was used instead.
    pub k_prime_fallback: bool,
    /// alpha is close to 1 (or the beta target was unreachable within K):
    /// slow convergence expected.
    pub high_alpha: bool,
    /// lambda1[k] alternates with k parity, the signature of a large
    /// negative eigenvalue.
    pub parity_oscillation: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_min: Option<f64>,
    pub lambda1_by_k: Vec<Option<f64>>,
    pub alpha_by_k: Vec<Option<f64>>,
    /// Per-k count of closed-walk observations.
    pub observations_by_k: Vec<u64>,
    /// k values in range whose counters stayed zero.
    pub missing_k: Vec<usize>,
    /// Variance/CI of the count estimate at k_prime; absent when weights
    /// overflowed into log-space accumulation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Diagnostics>,
}
