//! The walk-driven estimators.
//!
//! All four share one walk skeleton: take a draw, look at the window of
//! recently completed positions, and add a degree-product weight to the
//! counter of every closed-walk length observed at this step.
//!
//! * `naive_lambda1` counts walks the walk itself traversed
//!   (r_{i-k} == r_i).
//! * `cwalker_a` detects closure through the neighborhood of the node just
//!   left (r_{i-k} in N(r_{i-1})), costing no extra queries.
//! * `cwalker_b` runs the same detection for every k in [2, K] at once and
//!   picks k' from the accuracy target.
//! * `cwalker_c` counts common neighbors |N(r_{i-k+1}) ∩ N(r_{i-1})|,
//!   observing many closed walks per step, and also returns lambda2.

use crate::graph::{intersection_size, sorted_contains, GraphAccess};
use crate::walker::{SamplingRun, Step, WalkConfig, WalkEnd, WalkWindow};

use super::counters::ClosedWalkCounters;
use super::diagnostics::{Diagnostics, Welford};
use super::selection::{
    choose_k, clamp_alpha, lambda2_from_ln_traces, pick_lambda, top_n_levels,
};
use super::{Algorithm, EstimateError, EstimateReport};

/// Product of window degrees over back-offsets [from, to]; empty range is 1.
#[inline]
fn degree_product(window: &WalkWindow, from: usize, to: usize) -> f64 {
    let mut p = 1.0;
    let mut j = from;
    while j <= to {
        p *= window.degree_back(j).expect("window deep enough") as f64;
        j += 1;
    }
    p
}

#[inline]
fn ln_degree_product(window: &WalkWindow, from: usize, to: usize) -> f64 {
    let mut s = 0.0;
    let mut j = from;
    while j <= to {
        s += (window.degree_back(j).expect("window deep enough") as f64).ln();
        j += 1;
    }
    s
}

/// Accumulated state of one finished walk.
struct WalkOutcome {
    counters: ClosedWalkCounters,
    welford: Vec<Welford>,
    d_est: f64,
    ln_d_est: f64,
    counted: u64,
    draws: u64,
    queries: u64,
    incomplete: bool,
    /// A fired weight left double range; per-step diagnostics are off.
    overflow: bool,
}

impl WalkOutcome {
    /// ln of the trace estimate at k: ln c[k] + ln D_est - ln counted.
    fn ln_trace(&self, k: usize) -> Option<f64> {
        self.counters
            .counter(k)
            .ln_value()
            .map(|lc| lc + self.ln_d_est - (self.counted as f64).ln())
    }

    fn lambda1_at(&self, k: usize) -> Option<f64> {
        self.ln_trace(k).map(|lt| (lt / k as f64).exp())
    }

    fn diagnostics_at(&self, k: usize) -> Option<Diagnostics> {
        (!self.overflow && self.welford[k].count() > 0)
            .then(|| Diagnostics::from_welford(&self.welford[k], self.d_est))
    }
}

enum FixedKind {
    Naive,
    Membership,
}

fn run_fixed_walk<A: GraphAccess>(
    access: &mut A,
    k: usize,
    kind: FixedKind,
    cfg: &WalkConfig,
) -> Result<WalkOutcome, EstimateError> {
    let n = access.node_count();
    let mut run = SamplingRun::new(access, *cfg, k + 1, false)?;
    let mut counters = ClosedWalkCounters::new(k, k);
    let mut welford = vec![Welford::new(); k + 1];
    let incomplete;
    let mut overflow = false;
    loop {
        match run.advance()? {
            Step::Event(ev) => {
                if !ev.counted {
                    continue;
                }
                let window = run.window();
                let Some(r_back) = window.node_back(k - 1) else { continue };
                let (fired, weight) = match kind {
                    FixedKind::Naive => {
                        let fired = ev.drawn == r_back;
                        let w = if !fired {
                            0.0
                        } else if k >= 2 {
                            degree_product(window, 0, k - 2)
                        } else {
                            1.0
                        };
                        (fired, w)
                    }
                    FixedKind::Membership => {
                        let fired = sorted_contains(run.left_hood(), r_back);
                        let w = if !fired {
                            0.0
                        } else if k >= 3 {
                            degree_product(window, 1, k - 2)
                        } else {
                            1.0
                        };
                        (fired, w)
                    }
                };
                if fired {
                    let ln_term = || match kind {
                        FixedKind::Naive if k >= 2 => ln_degree_product(window, 0, k - 2),
                        FixedKind::Membership if k >= 3 => {
                            ln_degree_product(window, 1, k - 2)
                        }
                        _ => 0.0,
                    };
                    counters.add(k, weight, ln_term);
                    if !weight.is_finite() {
                        overflow = true;
                    }
                }
                if !overflow {
                    welford[k].update(weight);
                }
            }
            Step::Done(end) => {
                incomplete = end == WalkEnd::BudgetExhausted;
                break;
            }
        }
    }
    let d_est = run.d_accumulator().estimate(n)?;
    Ok(WalkOutcome {
        counters,
        welford,
        d_est,
        ln_d_est: d_est.ln(),
        counted: run.counted_steps(),
        draws: run.draws(),
        queries: run.queries_used(),
        incomplete,
        overflow,
    })
}

fn fixed_report<A: GraphAccess>(
    access: &mut A,
    algorithm: Algorithm,
    k: usize,
    kind: FixedKind,
    cfg: &WalkConfig,
) -> Result<EstimateReport, EstimateError> {
    let n = access.node_count();
    let out = run_fixed_walk(access, k, kind, cfg)?;
    let lambda1 = out.lambda1_at(k).ok_or(EstimateError::NoClosedWalks { k })?;
    let mut lambda1_by_k = vec![None; k + 1];
    lambda1_by_k[k] = Some(lambda1);
    Ok(EstimateReport {
        algorithm,
        n,
        seed: cfg.seed,
        walk_length: cfg.walk_length,
        burn_in: cfg.burn_in,
        k: Some(k),
        max_k: None,
        beta: None,
        k_prime: k,
        lambda1,
        lambda2: None,
        top_eigenvalues: None,
        d_est: out.d_est,
        queries_used: out.queries,
        walk_steps: out.draws,
        counted_steps: out.counted,
        incomplete: out.incomplete,
        k_prime_fallback: false,
        high_alpha: false,
        parity_oscillation: false,
        alpha_min: None,
        alpha_by_k: vec![None; k + 1],
        observations_by_k: out.counters.observations().to_vec(),
        missing_k: out.counters.missing_k(),
        diagnostics: out.diagnostics_at(k),
        lambda1_by_k,
    })
}

/// Estimate lambda1 from traversed closed walks of a fixed length k.
pub fn naive_lambda1<A: GraphAccess>(
    access: &mut A,
    k: usize,
    cfg: &WalkConfig,
) -> Result<EstimateReport, EstimateError> {
    if k < 1 {
        return Err(EstimateError::Config("naive estimator requires k >= 1".into()));
    }
    check_walk_covers(cfg, k)?;
    fixed_report(access, Algorithm::Naive, k, FixedKind::Naive, cfg)
}

/// Estimate lambda1 by neighbor-membership detection at a fixed length k.
pub fn cwalker_a<A: GraphAccess>(
    access: &mut A,
    k: usize,
    cfg: &WalkConfig,
) -> Result<EstimateReport, EstimateError> {
    if k < 2 {
        return Err(EstimateError::Config("membership detection requires k >= 2".into()));
    }
    check_walk_covers(cfg, k)?;
    fixed_report(access, Algorithm::A, k, FixedKind::Membership, cfg)
}

fn check_walk_covers(cfg: &WalkConfig, k: usize) -> Result<(), EstimateError> {
    if cfg.walk_length <= cfg.burn_in + k as u64 {
        return Err(EstimateError::Config(format!(
            "walk length {} must exceed burn-in {} plus closed-walk length {k}",
            cfg.walk_length, cfg.burn_in
        )));
    }
    Ok(())
}

fn check_adaptive(max_k: usize, beta: f64, cfg: &WalkConfig) -> Result<(), EstimateError> {
    if max_k < 5 {
        return Err(EstimateError::Config("max closed-walk length K must be >= 5".into()));
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(EstimateError::Config(format!("beta must be in (0,1), got {beta}")));
    }
    check_walk_covers(cfg, max_k)
}

fn run_membership_walk<A: GraphAccess>(
    access: &mut A,
    max_k: usize,
    cfg: &WalkConfig,
) -> Result<WalkOutcome, EstimateError> {
    let mut run = SamplingRun::new(access, *cfg, max_k + 1, false)?;
    let n = run.node_count();
    let mut counters = ClosedWalkCounters::new(2, max_k);
    let mut welford = vec![Welford::new(); max_k + 1];
    let incomplete;
    let mut overflow = false;
    loop {
        match run.advance()? {
            Step::Event(ev) => {
                if !ev.counted {
                    continue;
                }
                let window = run.window();
                let hood = run.left_hood();
                let mut prod = 1.0f64;
                for k in 2..=max_k {
                    let Some(r_back) = window.node_back(k - 1) else { break };
                    if sorted_contains(hood, r_back) {
                        counters.add(k, prod, || ln_degree_product(window, 1, k - 2));
                        if !prod.is_finite() {
                            overflow = true;
                        }
                        if !overflow {
                            welford[k].update(prod);
                        }
                    } else if !overflow {
                        welford[k].update(0.0);
                    }
                    match window.degree_back(k - 1) {
                        Some(d) => prod *= d as f64,
                        None => break,
                    }
                }
            }
            Step::Done(end) => {
                incomplete = end == WalkEnd::BudgetExhausted;
                break;
            }
        }
    }
    let d_est = run.d_accumulator().estimate(n)?;
    Ok(WalkOutcome {
        counters,
        welford,
        d_est,
        ln_d_est: d_est.ln(),
        counted: run.counted_steps(),
        draws: run.draws(),
        queries: run.queries_used(),
        incomplete,
        overflow,
    })
}

/// lambda1[k] for every k the walk defined, from the shared outcome.
fn lambda_table(out: &WalkOutcome, k_lo: usize, max_k: usize) -> Vec<Option<f64>> {
    let mut lambda1_by_k = vec![None; max_k + 1];
    for k in k_lo..=max_k {
        lambda1_by_k[k] = out.lambda1_at(k);
    }
    lambda1_by_k
}

/// alpha[k] over the scan range: the trace-difference lambda2 candidate at
/// (k-2, k) against lambda1[k]; the candidate falls back to lambda1[k]
/// itself when the difference is not positive or lambda1[k-2] is undefined.
fn alpha_table(
    out: &WalkOutcome,
    lambda1_by_k: &[Option<f64>],
    scan_lo: usize,
    max_k: usize,
) -> Vec<Option<f64>> {
    let mut alpha_by_k = vec![None; max_k + 1];
    for k in scan_lo..=max_k {
        let Some(l1k) = lambda1_by_k[k] else { continue };
        let cand = match (out.ln_trace(k - 2), out.ln_trace(k)) {
            (Some(ln_km2), Some(ln_k)) => lambda2_from_ln_traces(ln_km2, ln_k, k),
            _ => None,
        };
        let lam2 = cand.unwrap_or(l1k);
        alpha_by_k[k] = Some(clamp_alpha(lam2 / l1k));
    }
    alpha_by_k
}

/// Flag the even/odd alternation of lambda1[k] that a large negative
/// eigenvalue produces: odd-length closed walks missing entirely, or even
/// k sitting above both odd neighbors most of the time.
fn parity_oscillation(lambda1_by_k: &[Option<f64>], k_lo: usize) -> bool {
    let max_k = lambda1_by_k.len() - 1;
    let evens = (k_lo..=max_k).filter(|k| k % 2 == 0 && lambda1_by_k[*k].is_some()).count();
    let odds = (k_lo..=max_k).filter(|k| k % 2 == 1 && lambda1_by_k[*k].is_some()).count();
    if evens >= 3 && odds == 0 {
        return true;
    }
    let mut peaks = 0usize;
    let mut candidates = 0usize;
    for k in (k_lo + 1..max_k).filter(|k| k % 2 == 0) {
        if let (Some(lo), Some(mid), Some(hi)) =
            (lambda1_by_k[k - 1], lambda1_by_k[k], lambda1_by_k[k + 1])
        {
            candidates += 1;
            if mid > lo && mid > hi {
                peaks += 1;
            }
        }
    }
    candidates >= 3 && peaks * 10 >= candidates * 6
}

struct AdaptivePick {
    k_used: usize,
    lambda1: f64,
    fallback: bool,
    high_alpha: bool,
    alpha_min: Option<f64>,
}

fn pick_adaptive(
    lambda1_by_k: &[Option<f64>],
    alpha_by_k: &[Option<f64>],
    beta: f64,
    max_k: usize,
) -> Result<AdaptivePick, EstimateError> {
    let choice = choose_k(alpha_by_k, beta, max_k);
    let (k_used, lambda1) =
        pick_lambda(lambda1_by_k, choice.k_prime).ok_or(EstimateError::AllKMissing)?;
    Ok(AdaptivePick {
        k_used,
        lambda1,
        fallback: k_used != choice.k_prime,
        high_alpha: choice.capped_at_max
            || choice.alpha_min.map_or(false, |a| a >= 0.9),
        alpha_min: choice.alpha_min,
    })
}

/// Estimate lambda1 with automatic selection of the closed-walk length:
/// all lengths in [2, K] are counted on one walk, alpha = lambda2/lambda1
/// is estimated from trace differences, and k' is the smallest length that
/// pushes alpha^k under the accuracy target beta.
pub fn cwalker_b<A: GraphAccess>(
    access: &mut A,
    max_k: usize,
    beta: f64,
    cfg: &WalkConfig,
) -> Result<EstimateReport, EstimateError> {
    check_adaptive(max_k, beta, cfg)?;
    let n = access.node_count();
    let out = run_membership_walk(access, max_k, cfg)?;
    let lambda1_by_k = lambda_table(&out, 2, max_k);
    let alpha_by_k = alpha_table(&out, &lambda1_by_k, 3, max_k);
    let pick = pick_adaptive(&lambda1_by_k, &alpha_by_k, beta, max_k)?;
    Ok(EstimateReport {
        algorithm: Algorithm::B,
        n,
        seed: cfg.seed,
        walk_length: cfg.walk_length,
        burn_in: cfg.burn_in,
        k: None,
        max_k: Some(max_k),
        beta: Some(beta),
        k_prime: pick.k_used,
        lambda1: pick.lambda1,
        lambda2: None,
        top_eigenvalues: None,
        d_est: out.d_est,
        queries_used: out.queries,
        walk_steps: out.draws,
        counted_steps: out.counted,
        incomplete: out.incomplete,
        k_prime_fallback: pick.fallback,
        high_alpha: pick.high_alpha,
        parity_oscillation: parity_oscillation(&lambda1_by_k, 2),
        alpha_min: pick.alpha_min,
        diagnostics: out.diagnostics_at(pick.k_used),
        observations_by_k: out.counters.observations().to_vec(),
        missing_k: out.counters.missing_k(),
        lambda1_by_k,
        alpha_by_k,
    })
}

/// Estimate lambda1 and lambda2 together. Each step counts the common
/// neighbors of the window's endpoints, observing every closed walk those
/// two nodes participate in; lambda2 comes from the trace difference at
/// the chosen k'.
pub fn cwalker_c<A: GraphAccess>(
    access: &mut A,
    max_k: usize,
    beta: f64,
    cfg: &WalkConfig,
) -> Result<EstimateReport, EstimateError> {
    check_adaptive(max_k, beta, cfg)?;
    let n = access.node_count();
    let mut run = SamplingRun::new(access, *cfg, max_k + 1, true)?;
    let mut counters = ClosedWalkCounters::new(3, max_k);
    let mut welford = vec![Welford::new(); max_k + 1];
    let incomplete;
    let mut overflow = false;
    loop {
        match run.advance()? {
            Step::Event(ev) => {
                if !ev.counted {
                    continue;
                }
                let window = run.window();
                let hood = run.left_hood();
                let mut prod = 1.0f64;
                for k in 3..=max_k {
                    let Some(hood_back) = window.hood_back(k - 2) else { break };
                    let count = intersection_size(hood_back, hood);
                    let weight = prod * count as f64;
                    if count > 0 {
                        counters.add(k, weight, || {
                            ln_degree_product(window, 1, k - 3) + (count as f64).ln()
                        });
                        if !weight.is_finite() {
                            overflow = true;
                        }
                    }
                    if !overflow {
                        welford[k].update(weight);
                    }
                    match window.degree_back(k - 2) {
                        Some(d) => prod *= d as f64,
                        None => break,
                    }
                }
            }
            Step::Done(end) => {
                incomplete = end == WalkEnd::BudgetExhausted;
                break;
            }
        }
    }
    let d_est = run.d_accumulator().estimate(n)?;
    let out = WalkOutcome {
        counters,
        welford,
        d_est,
        ln_d_est: d_est.ln(),
        counted: run.counted_steps(),
        draws: run.draws(),
        queries: run.queries_used(),
        incomplete,
        overflow,
    };
    let lambda1_by_k = lambda_table(&out, 3, max_k);
    let alpha_by_k = alpha_table(&out, &lambda1_by_k, 4, max_k);
    let pick = pick_adaptive(&lambda1_by_k, &alpha_by_k, beta, max_k)?;

    // lambda2 at the chosen k': the trace difference when lambda1[k'-2]
    // dominates, otherwise lambda1[k'] itself.
    let k_used = pick.k_used;
    let lambda2 = match (k_used.checked_sub(2).and_then(|j| lambda1_by_k[j]), pick.lambda1) {
        (Some(l_km2), l_k) if l_km2 >= l_k => {
            match (out.ln_trace(k_used - 2), out.ln_trace(k_used)) {
                (Some(a), Some(b)) => lambda2_from_ln_traces(a, b, k_used).unwrap_or(0.0),
                _ => l_k,
            }
        }
        _ => pick.lambda1,
    };

    Ok(EstimateReport {
        algorithm: Algorithm::C,
        n,
        seed: cfg.seed,
        walk_length: cfg.walk_length,
        burn_in: cfg.burn_in,
        k: None,
        max_k: Some(max_k),
        beta: Some(beta),
        k_prime: k_used,
        lambda1: pick.lambda1,
        lambda2: Some(lambda2),
        top_eigenvalues: None,
        d_est: out.d_est,
        queries_used: out.queries,
        walk_steps: out.draws,
        counted_steps: out.counted,
        incomplete: out.incomplete,
        k_prime_fallback: pick.fallback,
        high_alpha: pick.high_alpha,
        parity_oscillation: parity_oscillation(&lambda1_by_k, 3),
        alpha_min: pick.alpha_min,
        diagnostics: out.diagnostics_at(k_used),
        observations_by_k: out.counters.observations().to_vec(),
        missing_k: out.counters.missing_k(),
        lambda1_by_k,
        alpha_by_k,
    })
}

/// Top-n eigenvalues from one membership walk: the sampled traces feed the
/// iterative deflation recurrence. Later eigenvalues inherit the errors of
/// earlier ones.
pub fn top_n_sampled<A: GraphAccess>(
    access: &mut A,
    max_k: usize,
    n_eigs: usize,
    beta: f64,
    cfg: &WalkConfig,
) -> Result<EstimateReport, EstimateError> {
    if n_eigs < 1 {
        return Err(EstimateError::Config("n_eigs must be >= 1".into()));
    }
    check_adaptive(max_k, beta, cfg)?;
    let n = access.node_count();
    let out = run_membership_walk(access, max_k, cfg)?;
    let mut traces = vec![None; max_k + 1];
    for k in 2..=max_k {
        traces[k] = out.ln_trace(k).map(f64::exp).filter(|t| t.is_finite());
    }
    let levels = top_n_levels(&traces, n_eigs, beta);
    let first = levels.first().ok_or(EstimateError::AllKMissing)?;
    let eigenvalues: Vec<f64> = levels.iter().map(|l| l.value).collect();
    Ok(EstimateReport {
        algorithm: Algorithm::TopN,
        n,
        seed: cfg.seed,
        walk_length: cfg.walk_length,
        burn_in: cfg.burn_in,
        k: None,
        max_k: Some(max_k),
        beta: Some(beta),
        k_prime: first.k_used,
        lambda1: first.value,
        lambda2: eigenvalues.get(1).copied(),
        d_est: out.d_est,
        queries_used: out.queries,
        walk_steps: out.draws,
        counted_steps: out.counted,
        incomplete: out.incomplete,
        k_prime_fallback: first.k_used != first.choice.k_prime,
        high_alpha: first.choice.capped_at_max,
        parity_oscillation: parity_oscillation(&first.lambda_by_k, 3),
        alpha_min: first.choice.alpha_min,
        diagnostics: out.diagnostics_at(first.k_used),
        observations_by_k: out.counters.observations().to_vec(),
        missing_k: out.counters.missing_k(),
        lambda1_by_k: first.lambda_by_k.clone(),
        alpha_by_k: first.alpha_by_k.clone(),
        top_eigenvalues: Some(eigenvalues),
    })
}
