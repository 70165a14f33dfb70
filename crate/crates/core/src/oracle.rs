//! Exact reference computations: brute-force closed-walk counts, dense
//! spectra of small graphs via cyclic Jacobi rotations, and sparse power
//! iteration with deflation for the top two eigenvalues of large graphs.
//!
//! These are test oracles and ground-truth providers, not performance
//! products; caps keep them honest about what they can do exactly.

use serde::{Deserialize, Serialize};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;

/// Node cap for the dense routines.
pub const DENSE_NODE_CAP: usize = 2000;
/// Default node cap for brute-force walk enumeration.
pub const BRUTE_NODE_CAP: usize = 14;
/// Walk-enumeration step cap.
pub const BRUTE_WORK_CAP: f64 = 2e9;

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("{op} refuses {n} nodes (cap {cap}); use an iterative method instead")]
    NodeCap { op: &'static str, n: usize, cap: usize },
    #[error("brute-force enumeration would take ~{est:.1e} steps (cap {cap:.1e})")]
    WorkCap { est: f64, cap: f64 },
    #[error("Jacobi sweeps did not converge after {0} sweeps")]
    JacobiStalled(usize),
}

/// How a spectrum was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumMethod {
    Dense,
    PowerDeflation,
}

/// Eigenvalues sorted descending plus convergence evidence.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub method: SpectrumMethod,
    /// ||A v - lambda v|| per reported eigenvalue (dense: final
    /// off-diagonal Frobenius norm, one entry).
    pub residuals: Vec<f64>,
    pub iterations: u64,
    pub converged: bool,
    /// Largest |v2 . v1| seen after re-orthogonalization (power-deflation).
    pub max_deflation_drift: f64,
}

impl Spectrum {
    pub fn lambda1(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn lambda2(&self) -> Option<f64> {
        self.eigenvalues.get(1).copied()
    }

    pub fn lambda3(&self) -> Option<f64> {
        self.eigenvalues.get(2).copied()
    }

    /// Spectral moment sum(lambda_i^k).
    pub fn moment(&self, k: usize) -> f64 {
        self.eigenvalues.iter().map(|l| l.powi(k as i32)).sum()
    }
}

// ---------------------------------------------------------------------------
// Brute-force closed-walk enumeration
// ---------------------------------------------------------------------------

/// Exact number of edge visits the depth-first enumeration will make:
/// sum over j <= k_max of the walks of length j from every start, computed
/// as row sums of A^j.
fn enumeration_work(g: &Graph, k_max: usize) -> f64 {
    let n = g.node_count();
    let mut x = vec![1.0f64; n];
    let mut y = vec![0.0f64; n];
    let mut total = 0.0;
    for _ in 1..=k_max {
        for (v, slot) in y.iter_mut().enumerate() {
            *slot = g.neighbors(v as u32).iter().map(|&u| x[u as usize]).sum();
        }
        total += y.iter().sum::<f64>();
        std::mem::swap(&mut x, &mut y);
    }
    total
}

/// Exact counts of closed walks of every length 1..=k_max by depth-first
/// enumeration from every node. `profile[k]` is the count at length k.
pub fn closed_walk_profile(g: &Graph, k_max: usize) -> Result<Vec<u64>, OracleError> {
    assert!(k_max >= 1);
    let est = enumeration_work(g, k_max);
    if g.node_count() > BRUTE_NODE_CAP && est > BRUTE_WORK_CAP {
        return Err(OracleError::NodeCap {
            op: "closed-walk enumeration",
            n: g.node_count(),
            cap: BRUTE_NODE_CAP,
        });
    }
    if est > BRUTE_WORK_CAP * 5.0 {
        return Err(OracleError::WorkCap { est, cap: BRUTE_WORK_CAP * 5.0 });
    }
    let mut profile = vec![0u64; k_max + 1];
    for s in 0..g.node_count() as u32 {
        walk_from(g, s, s, 0, k_max, &mut profile);
    }
    Ok(profile)
}

fn walk_from(g: &Graph, start: u32, v: u32, depth: usize, k_max: usize, profile: &mut [u64]) {
    for &u in g.neighbors(v) {
        if u == start {
            profile[depth + 1] += 1;
        }
        if depth + 1 < k_max {
            walk_from(g, start, u, depth + 1, k_max, profile);
        }
    }
}

/// Exact number of closed walks of length k (tr(A^k)) by enumeration.
pub fn brute_force_closed_walks(g: &Graph, k: usize) -> Result<u64, OracleError> {
    Ok(closed_walk_profile(g, k)?[k])
}

// ---------------------------------------------------------------------------
// Dense traces and spectra
// ---------------------------------------------------------------------------

fn check_dense(op: &'static str, g: &Graph) -> Result<(), OracleError> {
    if g.node_count() > DENSE_NODE_CAP {
        return Err(OracleError::NodeCap { op, n: g.node_count(), cap: DENSE_NODE_CAP });
    }
    Ok(())
}

/// tr(A^k) by k sparse mat-vecs per basis vector. Exact while entries stay
/// below 2^53.
pub fn dense_trace_power(g: &Graph, k: usize) -> Result<f64, OracleError> {
    check_dense("dense trace", g)?;
    assert!(k >= 1);
    let n = g.node_count();
    let mut trace = 0.0f64;
    let mut x = vec![0.0f64; n];
    let mut y = vec![0.0f64; n];
    for i in 0..n {
        x.iter_mut().for_each(|v| *v = 0.0);
        x[i] = 1.0;
        for _ in 0..k {
            for (v, slot) in y.iter_mut().enumerate() {
                *slot = g.neighbors(v as u32).iter().map(|&u| x[u as usize]).sum();
            }
            std::mem::swap(&mut x, &mut y);
        }
        trace += x[i];
    }
    Ok(trace)
}

/// Full spectrum of the adjacency matrix via cyclic Jacobi rotations,
/// sorted descending. Off-diagonal Frobenius norm is driven below
/// 1e-10 * ||A||_F.
pub fn dense_spectrum(g: &Graph) -> Result<Spectrum, OracleError> {
    check_dense("dense spectrum", g)?;
    let n = g.node_count();
    let mut a = vec![0.0f64; n * n];
    for v in 0..n {
        for &u in g.neighbors(v as u32) {
            a[v * n + u as usize] = 1.0;
        }
    }
    let norm_a = (2.0 * g.edge_count() as f64).sqrt(); // Frobenius norm of a 0/1 adjacency
    let target = 1e-10 * norm_a;

    const MAX_SWEEPS: usize = 50;
    let mut sweeps = 0usize;
    let mut off = off_norm(&a, n);
    while off > target {
        if sweeps >= MAX_SWEEPS {
            return Err(OracleError::JacobiStalled(sweeps));
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                jacobi_rotate(&mut a, n, p, q);
            }
        }
        sweeps += 1;
        off = off_norm(&a, n);
    }
    let mut eigenvalues: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eigenvalues.sort_by(|x, y| y.partial_cmp(x).expect("eigenvalues are finite"));
    Ok(Spectrum {
        eigenvalues,
        method: SpectrumMethod::Dense,
        residuals: vec![off],
        iterations: sweeps as u64,
        converged: true,
        max_deflation_drift: 0.0,
    })
}

fn off_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for p in 0..n {
        for q in 0..n {
            if p != q {
                s += a[p * n + q] * a[p * n + q];
            }
        }
    }
    s.sqrt()
}

fn jacobi_rotate(a: &mut [f64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    if apq == 0.0 {
        return;
    }
    let h = a[q * n + q] - a[p * n + p];
    let t = if apq.abs() * 1e15 < h.abs() {
        apq / h
    } else {
        let theta = h / (2.0 * apq);
        let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
        if theta < 0.0 {
            -t
        } else {
            t
        }
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let tau = s / (1.0 + c);

    let tapq = t * apq;
    a[p * n + p] -= tapq;
    a[q * n + q] += tapq;
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;
    for j in 0..n {
        if j == p || j == q {
            continue;
        }
        let ajp = a[j * n + p];
        let ajq = a[j * n + q];
        let new_p = ajp - s * (ajq + ajp * tau);
        let new_q = ajq + s * (ajp - ajq * tau);
        a[j * n + p] = new_p;
        a[p * n + j] = new_p;
        a[j * n + q] = new_q;
        a[q * n + j] = new_q;
    }
}

// ---------------------------------------------------------------------------
// Sparse power iteration with deflation
// ---------------------------------------------------------------------------

/// sqrt of the max row sum of A^2: an upper bound on lambda1 (hence on
/// |lambda_min|), used as a positive spectral shift so that power iteration
/// converges to the algebraically largest eigenvalues even on bipartite or
/// near-bipartite graphs.
fn shift_bound(g: &Graph) -> f64 {
    let mut best = 0usize;
    for v in 0..g.node_count() as u32 {
        let s: usize = g.neighbors(v).iter().map(|&u| g.degree(u)).sum();
        best = best.max(s);
    }
    (best as f64).sqrt()
}

fn matvec_shifted(g: &Graph, sigma: f64, x: &[f64], y: &mut [f64]) {
    for (v, slot) in y.iter_mut().enumerate() {
        let mut s = 0.0;
        for &u in g.neighbors(v as u32) {
            s += x[u as usize];
        }
        *slot = s + sigma * x[v];
    }
}

fn matvec(g: &Graph, x: &[f64], y: &mut [f64]) {
    matvec_shifted(g, 0.0, x, y)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn seeded_unit_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    v
}

struct StageResult {
    vector: Vec<f64>,
    iterations: u64,
    converged: bool,
    max_drift: f64,
}

/// One power-iteration stage on A + sigma I, optionally deflating against
/// `against` every iteration. Stops when successive Rayleigh quotients
/// differ by less than tol.
fn power_stage(
    g: &Graph,
    sigma: f64,
    against: Option<&[f64]>,
    tol: f64,
    max_iters: u64,
    seed: u64,
) -> StageResult {
    let n = g.node_count();
    let mut v = seeded_unit_vector(n, seed);
    let mut w = vec![0.0f64; n];
    let mut max_drift = 0.0f64;
    let mut prev_ritz = f64::INFINITY;
    let mut iterations = 0u64;
    let mut converged = false;
    if let Some(v1) = against {
        orthogonalize(&mut v, v1);
        let vn = norm(&v);
        if vn > 1e-12 {
            v.iter_mut().for_each(|x| *x /= vn);
        }
        max_drift = max_drift.max(dot(&v, v1).abs());
    }
    while iterations < max_iters {
        iterations += 1;
        matvec_shifted(g, sigma, &v, &mut w);
        let ritz = dot(&v, &w);
        let wn = norm(&w);
        if wn < 1e-300 {
            // The deflated operator annihilates this direction: v is an
            // exact eigenvector of eigenvalue -sigma.
            let vn = norm(&v);
            if vn > 0.0 {
                v.iter_mut().for_each(|x| *x /= vn);
            }
            converged = true;
            break;
        }
        w.iter_mut().for_each(|x| *x /= wn);
        if let Some(v1) = against {
            orthogonalize(&mut w, v1);
            let wn2 = norm(&w);
            if wn2 < 1e-12 {
                // Nothing left outside span(v1); restart from a fresh seed.
                v = seeded_unit_vector(n, seed.wrapping_add(iterations));
                orthogonalize(&mut v, v1);
                prev_ritz = f64::INFINITY;
                continue;
            }
            w.iter_mut().for_each(|x| *x /= wn2);
            max_drift = max_drift.max(dot(&w, v1).abs());
        }
        std::mem::swap(&mut v, &mut w);
        if (ritz - prev_ritz).abs() < tol {
            converged = true;
            break;
        }
        prev_ritz = ritz;
    }
    StageResult { vector: v, iterations, converged, max_drift }
}

fn orthogonalize(v: &mut [f64], against: &[f64]) {
    let proj = dot(v, against);
    v.iter_mut().zip(against).for_each(|(x, a)| *x -= proj * a);
}

/// Top two eigenvalues of the adjacency matrix by shifted power iteration
/// with deflation, refined by a final 2x2 Rayleigh-Ritz step on
/// span{v1, v2} (which resolves near-ties).
pub fn power_iteration_top2(g: &Graph, tol: f64, max_iters: u64) -> Spectrum {
    assert!(tol > 0.0);
    let n = g.node_count();
    if n == 1 {
        return Spectrum {
            eigenvalues: vec![0.0],
            method: SpectrumMethod::PowerDeflation,
            residuals: vec![0.0],
            iterations: 0,
            converged: true,
            max_deflation_drift: 0.0,
        };
    }
    let sigma = shift_bound(g);
    let s1 = power_stage(g, sigma, None, tol, max_iters, 0x517ec7a1);
    let s2 = power_stage(g, sigma, Some(&s1.vector), tol, max_iters, 0x517ec7a2);

    // Rayleigh-Ritz on span{v1, v2} against the unshifted A.
    let (v1, v2) = (&s1.vector, &s2.vector);
    let mut av1 = vec![0.0; n];
    let mut av2 = vec![0.0; n];
    matvec(g, v1, &mut av1);
    matvec(g, v2, &mut av2);
    let b11 = dot(v1, &av1);
    let b12 = dot(v1, &av2);
    let b22 = dot(v2, &av2);
    let mean = 0.5 * (b11 + b22);
    let half = (0.25 * (b11 - b22) * (b11 - b22) + b12 * b12).sqrt();
    let (mu1, mu2) = (mean + half, mean - half);

    // Ritz vectors: rotate (v1, v2) by the 2x2 eigenbasis.
    let angle_vec = |mu: f64| -> Vec<f64> {
        // (B - mu I) (c, s)^T = 0  =>  direction (b12, mu - b11), or the
        // canonical axis when b12 vanishes.
        let (c, s) = if b12.abs() > 1e-300 {
            let r = (b12 * b12 + (mu - b11) * (mu - b11)).sqrt();
            (b12 / r, (mu - b11) / r)
        } else if (mu - b11).abs() <= (mu - b22).abs() {
            (1.0, 0.0)
        } else {
            (0.0, 1.0)
        };
        v1.iter().zip(v2).map(|(a, b)| c * a + s * b).collect()
    };
    let residual_of = |x: &[f64], mu: f64| -> f64 {
        let mut ax = vec![0.0; n];
        matvec(g, x, &mut ax);
        let xn = norm(x).max(1e-300);
        ax.iter().zip(x).map(|(a, b)| (a - mu * b).powi(2)).sum::<f64>().sqrt() / xn
    };
    let x1 = angle_vec(mu1);
    let x2 = angle_vec(mu2);

    Spectrum {
        eigenvalues: vec![mu1, mu2],
        method: SpectrumMethod::PowerDeflation,
        residuals: vec![residual_of(&x1, mu1), residual_of(&x2, mu2)],
        iterations: s1.iterations + s2.iterations,
        converged: s1.converged && s2.converged,
        max_deflation_drift: s2.max_drift,
    }
}

/// Cheap sanity bounds: max(sqrt(max degree), average degree) <= lambda1
/// <= max degree.
pub fn lambda1_bounds(g: &Graph) -> (f64, f64) {
    let delta = g.max_degree() as f64;
    let avg = g.degree_sum() as f64 / g.node_count() as f64;
    (delta.sqrt().max(avg), delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    #[test]
    fn triangle_walk_counts() {
        let g = gen::cycle(3);
        assert_eq!(brute_force_closed_walks(&g, 3).unwrap(), 6);
        assert_eq!(brute_force_closed_walks(&g, 2).unwrap(), 6); // 2|E|
        assert_eq!(brute_force_closed_walks(&g, 4).unwrap(), 18);
        assert_eq!(brute_force_closed_walks(&g, 1).unwrap(), 0);
    }

    #[test]
    fn closed_walks_of_length_two_count_edge_endpoints() {
        let g = gen::barbell();
        assert_eq!(
            brute_force_closed_walks(&g, 2).unwrap() as usize,
            2 * g.edge_count()
        );
    }

    #[test]
    fn dense_trace_matches_brute_force() {
        let g = gen::petersen();
        for k in 1..=8 {
            let brute = brute_force_closed_walks(&g, k).unwrap() as f64;
            let dense = dense_trace_power(&g, k).unwrap();
            assert_eq!(brute, dense, "k={k}");
        }
    }

    #[test]
    fn petersen_trace_from_moment_formula() {
        // Spectrum 3, 1 (x5), -2 (x4): tr(A^6) = 729 + 5 + 4*64 = 990.
        let g = gen::petersen();
        assert_eq!(dense_trace_power(&g, 6).unwrap(), 990.0);
        assert_eq!(dense_trace_power(&g, 2).unwrap(), 30.0);
        // tr(A^2) = 2|E| on any simple graph.
        assert_eq!(dense_trace_power(&gen::complete(4), 2).unwrap(), 12.0);
    }

    #[test]
    fn k4_spectrum() {
        let s = dense_spectrum(&gen::complete(4)).unwrap();
        let expect = [3.0, -1.0, -1.0, -1.0];
        for (a, b) in s.eigenvalues.iter().zip(expect) {
            assert!((a - b).abs() < 1e-9, "{:?}", s.eigenvalues);
        }
    }

    #[test]
    fn star_spectrum() {
        let s = dense_spectrum(&gen::star(4)).unwrap();
        let expect = [2.0, 0.0, 0.0, 0.0, -2.0];
        for (a, b) in s.eigenvalues.iter().zip(expect) {
            assert!((a - b).abs() < 1e-9, "{:?}", s.eigenvalues);
        }
    }

    #[test]
    fn cycle_spectrum_matches_closed_form() {
        // C5: eigenvalues 2 cos(2 pi j / 5).
        let s = dense_spectrum(&gen::cycle(5)).unwrap();
        let mut expect: Vec<f64> =
            (0..5).map(|j| 2.0 * (2.0 * std::f64::consts::PI * j as f64 / 5.0).cos()).collect();
        expect.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (a, b) in s.eigenvalues.iter().zip(expect) {
            assert!((a - b).abs() < 1e-9, "{:?}", s.eigenvalues);
        }
    }

    #[test]
    fn dense_spectrum_is_traceless() {
        let g = gen::erdos_renyi_connected(60, 3.0, 7);
        let s = dense_spectrum(&g).unwrap();
        let trace: f64 = s.eigenvalues.iter().sum();
        assert!(trace.abs() < 1e-8 * g.node_count() as f64, "trace {trace}");
    }

    #[test]
    fn power_iteration_agrees_with_dense() {
        for seed in [1u64, 2, 3] {
            let g = gen::erdos_renyi_connected(80, 4.0, seed);
            let dense = dense_spectrum(&g).unwrap();
            let power = power_iteration_top2(&g, 1e-13, 100_000);
            assert!(power.converged, "seed {seed}");
            assert!(
                (power.eigenvalues[0] - dense.eigenvalues[0]).abs() < 1e-8,
                "seed {seed}: {} vs {}",
                power.eigenvalues[0],
                dense.eigenvalues[0]
            );
            assert!(
                (power.eigenvalues[1] - dense.eigenvalues[1]).abs() < 1e-8,
                "seed {seed}: {} vs {}",
                power.eigenvalues[1],
                dense.eigenvalues[1]
            );
            assert!(power.max_deflation_drift < 1e-10);
        }
    }

    #[test]
    fn power_iteration_handles_bipartite_star() {
        let s = power_iteration_top2(&gen::star(4), 1e-13, 50_000);
        assert!((s.eigenvalues[0] - 2.0).abs() < 1e-9, "{:?}", s.eigenvalues);
        assert!(s.eigenvalues[1].abs() < 1e-9, "{:?}", s.eigenvalues);
    }

    #[test]
    fn power_iteration_k2_negative_second() {
        let s = power_iteration_top2(&gen::complete(2), 1e-13, 10_000);
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-9);
        assert!((s.eigenvalues[1] + 1.0).abs() < 1e-9);
    }

    #[test]
    fn bounds_hold_on_random_graphs() {
        for seed in 0..5u64 {
            let g = gen::erdos_renyi_connected(50, 3.0, seed);
            let s = dense_spectrum(&g).unwrap();
            let (lo, hi) = lambda1_bounds(&g);
            assert!(s.lambda1() >= lo - 1e-9 && s.lambda1() <= hi + 1e-9);
        }
    }

    #[test]
    fn brute_force_refuses_large_graphs() {
        let g = gen::erdos_renyi_connected(200, 3.0, 1);
        assert!(matches!(
            closed_walk_profile(&g, 12),
            Err(OracleError::NodeCap { .. })
        ));
    }
}
