//! Closed-walk length selection and trace-based eigenvalue extraction.
//!
//! The accuracy target beta bounds alpha^k (alpha = lambda2/lambda1), so
//! ceil(log beta / log alpha) is the smallest usable k; it is clamped into
//! [5, K]. lambda2 comes from the difference of two spectral moments:
//! lambda2 ~ (tr(A^{k-2}) - tr(A^k)^{(k-2)/k})^{1/(k-2)}.

/// Computed alpha estimates are clamped here before the log-ratio: sampling
/// noise can push alpha to 1 or beyond, where log(alpha) stops making sense.
pub const ALPHA_CLAMP_MIN: f64 = 1e-6;
pub const ALPHA_CLAMP_MAX: f64 = 0.999;

/// Floor on the chosen closed-walk length.
pub const K_PRIME_FLOOR: usize = 5;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SelectionError {
    #[error("lambda2 indeterminate at k={k}: trace difference is not positive")]
    Indeterminate { k: usize },
    #[error("invalid argument: {0}")]
    Invalid(String),
}

#[inline]
pub fn clamp_alpha(alpha: f64) -> f64 {
    alpha.clamp(ALPHA_CLAMP_MIN, ALPHA_CLAMP_MAX)
}

/// Outcome of the k-selection rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KChoice {
    pub k_prime: usize,
    /// Smallest defined alpha after clamping, if any alpha was defined.
    pub alpha_min: Option<f64>,
    /// ceil(log beta / log alpha_min) before clamping into [5, K].
    pub unclamped: Option<u64>,
    /// No usable alpha entry existed; k_prime defaulted to K.
    pub no_alpha: bool,
    /// The unclamped choice exceeded K (the beta target is unreachable
    /// within the permitted walk lengths, the signature of alpha near 1).
    pub capped_at_max: bool,
}

/// k' = max(5, min(ceil(log beta / log min(alpha)), K)), minimum over
/// defined alpha entries only. With no defined entry, returns K flagged.
pub fn choose_k(alpha_by_k: &[Option<f64>], beta: f64, max_k: usize) -> KChoice {
    assert!(beta > 0.0 && beta < 1.0, "beta must be in (0,1)");
    let alpha_min = alpha_by_k
        .iter()
        .flatten()
        .map(|&a| clamp_alpha(a))
        .min_by(|a, b| a.partial_cmp(b).expect("clamped alpha is not NaN"));
    match alpha_min {
        None => KChoice {
            k_prime: max_k,
            alpha_min: None,
            unclamped: None,
            no_alpha: true,
            capped_at_max: true,
        },
        Some(a) => {
            let raw = (beta.ln() / a.ln()).ceil();
            let raw = if raw.is_finite() && raw > 0.0 { raw as u64 } else { 1 };
            let k_prime = (raw as usize).min(max_k).max(K_PRIME_FLOOR);
            KChoice {
                k_prime,
                alpha_min: Some(a),
                unclamped: Some(raw),
                no_alpha: false,
                capped_at_max: raw > max_k as u64,
            }
        }
    }
}

/// lambda2 from two spectral moments (linear domain, exact arithmetic the
/// tests can pin): (trace_km2 - trace_k^{(k-2)/k})^{1/(k-2)}.
pub fn lambda2_from_traces(
    trace_km2: f64,
    trace_k: f64,
    k: usize,
) -> Result<f64, SelectionError> {
    if k < 3 {
        return Err(SelectionError::Invalid(format!("k must be >= 3, got {k}")));
    }
    if !(trace_km2 > 0.0 && trace_k > 0.0) {
        return Err(SelectionError::Invalid("trace values must be positive".into()));
    }
    let e = (k as f64 - 2.0) / k as f64;
    let diff = trace_km2 - trace_k.powf(e);
    if diff <= 0.0 {
        return Err(SelectionError::Indeterminate { k });
    }
    Ok(diff.powf(1.0 / (k as f64 - 2.0)))
}

/// Log-domain twin of `lambda2_from_traces` for sampled traces that may
/// exceed double range. Returns None when the difference is not positive
/// or sits below the cancellation noise of the subtraction.
pub(crate) fn lambda2_from_ln_traces(ln_km2: f64, ln_k: f64, k: usize) -> Option<f64> {
    let ln_t = ln_k * (k as f64 - 2.0) / k as f64;
    if ln_km2 <= ln_t + 1e-12 {
        return None;
    }
    // ln(e^a - e^b) = a + ln(1 - e^{b-a}) for a > b.
    let ln_diff = ln_km2 + (-(ln_t - ln_km2).exp()).ln_1p();
    Some((ln_diff / (k as f64 - 2.0)).exp())
}

/// One level of the iterative top-n extraction.
#[derive(Debug, Clone)]
struct Level {
    lambda_by_k: Vec<Option<f64>>,
    alpha_by_k: Vec<Option<f64>>,
}

fn deflated_level(traces: &[Option<f64>], committed: &[f64]) -> Level {
    let k_max = traces.len() - 1;
    let mut residual = vec![None; k_max + 1];
    for k in 1..=k_max {
        if let Some(t) = traces[k] {
            let r = t - committed.iter().map(|l| l.powi(k as i32)).sum::<f64>();
            // A residual below the cancellation noise of the subtraction is
            // floating-point dust, not signal.
            if r > t * 1e-12 {
                residual[k] = Some(r);
            }
        }
    }
    let mut lambda_by_k = vec![None; k_max + 1];
    let mut alpha_by_k = vec![None; k_max + 1];
    for k in 3..=k_max {
        let Some(r_k) = residual[k] else { continue };
        let lam = r_k.powf(1.0 / k as f64);
        lambda_by_k[k] = Some(lam);
        let next = match residual[k - 2] {
            Some(r_km2) => match lambda2_from_traces(r_km2, r_k, k) {
                Ok(l2) => l2,
                Err(_) => lam,
            },
            None => lam,
        };
        alpha_by_k[k] = Some(clamp_alpha(next / lam));
    }
    Level { lambda_by_k, alpha_by_k }
}

/// One committed eigenvalue of the iterative extraction, with the
/// per-level tables that produced it.
#[derive(Debug, Clone)]
pub(crate) struct LevelPick {
    pub k_used: usize,
    pub value: f64,
    pub choice: KChoice,
    pub lambda_by_k: Vec<Option<f64>>,
    pub alpha_by_k: Vec<Option<f64>>,
}

pub(crate) fn top_n_levels(
    traces: &[Option<f64>],
    n_eigs: usize,
    beta: f64,
) -> Vec<LevelPick> {
    let k_max = traces.len().saturating_sub(1);
    if k_max < 3 {
        return Vec::new();
    }
    let mut committed: Vec<f64> = Vec::new();
    let mut out: Vec<LevelPick> = Vec::with_capacity(n_eigs);
    for _ in 0..n_eigs {
        let level = deflated_level(traces, &committed);
        let choice = choose_k(&level.alpha_by_k, beta, k_max);
        match pick_lambda(&level.lambda_by_k, choice.k_prime) {
            Some((k_used, value)) => {
                // Deflation must produce a descending sequence; a level
                // that climbs back up is reading noise, so the list
                // truncates there.
                if let Some(prev) = out.last() {
                    if value > prev.value * (1.0 + 1e-9) {
                        break;
                    }
                }
                committed.push(value);
                out.push(LevelPick {
                    k_used,
                    value,
                    choice,
                    lambda_by_k: level.lambda_by_k,
                    alpha_by_k: level.alpha_by_k,
                });
            }
            None => break,
        }
    }
    out
}

/// Iteratively estimate the top `n_eigs` eigenvalues from a table of
/// spectral moments (`traces[k]` = tr(A^k) or its sampled estimate).
///
/// Each level deflates the traces by the eigenvalues committed so far,
/// takes the k-th root at a beta-selected k, and moves on. Errors
/// propagate level to level, so later eigenvalues are less reliable. The
/// output is descending by construction: a level with no usable deflated
/// trace, or one whose estimate climbs back above its predecessor,
/// truncates the list.
pub fn top_n_iterative(traces: &[Option<f64>], n_eigs: usize, beta: f64) -> Vec<f64> {
    assert!(n_eigs >= 1);
    top_n_levels(traces, n_eigs, beta).iter().map(|l| l.value).collect()
}

/// lambda at k', falling back to the nearest defined k at or above k',
/// then the largest defined k below it.
pub(crate) fn pick_lambda(
    lambda_by_k: &[Option<f64>],
    k_prime: usize,
) -> Option<(usize, f64)> {
    let k_max = lambda_by_k.len() - 1;
    for k in k_prime..=k_max {
        if let Some(l) = lambda_by_k[k] {
            return Some((k, l));
        }
    }
    for k in (0..k_prime.min(k_max + 1)).rev() {
        if let Some(l) = lambda_by_k[k] {
            return Some((k, l));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn some(vals: &[(usize, f64)], len: usize) -> Vec<Option<f64>> {
        let mut v = vec![None; len];
        for &(k, a) in vals {
            v[k] = Some(a);
        }
        v
    }

    #[test]
    fn choose_k_defaults_to_max_when_alpha_is_high() {
        // min alpha 0.99, beta 0.05 -> unclamped 299 -> K.
        let alphas = vec![Some(0.99); 31];
        let c = choose_k(&alphas, 0.05, 30);
        assert_eq!(c.unclamped, Some(299));
        assert_eq!(c.k_prime, 30);
        assert!(c.capped_at_max);
    }

    #[test]
    fn choose_k_mid_alpha() {
        let alphas = some(&[(7, 0.5)], 31);
        let c = choose_k(&alphas, 0.05, 30);
        assert_eq!(c.unclamped, Some(5));
        assert_eq!(c.k_prime, 5);
        assert!(!c.capped_at_max);
    }

    #[test]
    fn choose_k_clamps_small_values_to_floor() {
        let alphas = some(&[(10, 0.1)], 31);
        let c = choose_k(&alphas, 0.05, 30);
        assert_eq!(c.unclamped, Some(2));
        assert_eq!(c.k_prime, 5);
    }

    #[test]
    fn choose_k_example_alpha_08() {
        // ceil(ln 0.05 / ln 0.8) = 14
        let alphas = some(&[(6, 0.8)], 31);
        let c = choose_k(&alphas, 0.05, 30);
        assert_eq!(c.unclamped, Some(14));
        assert_eq!(c.k_prime, 14);
    }

    #[test]
    fn choose_k_without_alphas_warns_and_returns_max() {
        let alphas: Vec<Option<f64>> = vec![None; 31];
        let c = choose_k(&alphas, 0.05, 30);
        assert!(c.no_alpha);
        assert_eq!(c.k_prime, 30);
    }

    #[test]
    fn choose_k_uses_minimum_alpha_only() {
        let a = some(&[(5, 0.9), (6, 0.5), (7, 0.7)], 31);
        let b = some(&[(9, 0.5)], 31);
        assert_eq!(choose_k(&a, 0.05, 30).k_prime, choose_k(&b, 0.05, 30).k_prime);
    }

    #[test]
    fn lambda2_boundary_difference_is_error() {
        let trace_k = 1234.5f64;
        let k = 12;
        let trace_km2 = trace_k.powf((k as f64 - 2.0) / k as f64);
        assert_eq!(
            lambda2_from_traces(trace_km2, trace_k, k),
            Err(SelectionError::Indeterminate { k })
        );
    }

    #[test]
    fn lambda2_rejects_bad_arguments() {
        assert!(matches!(
            lambda2_from_traces(1.0, 1.0, 2),
            Err(SelectionError::Invalid(_))
        ));
        assert!(matches!(
            lambda2_from_traces(0.0, 1.0, 5),
            Err(SelectionError::Invalid(_))
        ));
    }

    #[test]
    fn lambda2_ln_route_matches_linear_route() {
        let (t10, t12) = (63150.0f64, 547830.0f64);
        let lin = lambda2_from_traces(t10, t12, 12).unwrap();
        let ln = lambda2_from_ln_traces(t10.ln(), t12.ln(), 12).unwrap();
        assert!((lin - ln).abs() / lin < 1e-12, "{lin} vs {ln}");
    }

    #[test]
    fn top_n_single_level_is_plain_root_at_k_prime() {
        // Exact two-eigenvalue moments: 4^k + 2^k.
        let mut traces = vec![None; 21];
        for k in 1..=20 {
            traces[k] = Some(4f64.powi(k as i32) + 2f64.powi(k as i32));
        }
        let out = top_n_iterative(&traces, 1, 0.05);
        assert_eq!(out.len(), 1);
        // alpha ~ 0.5 -> k' = 5.
        let expect = (4f64.powi(5) + 2f64.powi(5)).powf(0.2);
        assert!((out[0] - expect).abs() < 1e-12);
    }

    #[test]
    fn top_n_truncates_when_residual_vanishes() {
        // Rank-one moments with lambda1 = 1: every root is exactly 1, so the
        // level-2 deflated trace is exactly 0 and the list truncates.
        let traces: Vec<Option<f64>> =
            std::iter::once(None).chain(std::iter::repeat(Some(1.0)).take(20)).collect();
        let out = top_n_iterative(&traces, 3, 0.05);
        assert_eq!(out, vec![1.0]);
    }

    #[test]
    fn pick_lambda_falls_back_sensibly() {
        let l = some(&[(4, 2.0), (8, 3.0)], 11);
        assert_eq!(pick_lambda(&l, 5), Some((8, 3.0)));
        assert_eq!(pick_lambda(&l, 9), Some((8, 3.0)));
        assert_eq!(pick_lambda(&l, 3), Some((4, 2.0)));
        assert_eq!(pick_lambda(&vec![None; 5], 3), None);
    }
}
