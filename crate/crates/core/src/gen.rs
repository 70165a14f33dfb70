//! Deterministic graph constructions for tests, benchmarks, and examples.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;

/// Complete graph K_n.
pub fn complete(n: usize) -> Graph {
    assert!(n >= 2);
    let mut edges = Vec::new();
    for u in 0..n as u64 {
        for v in u + 1..n as u64 {
            edges.push((u, v));
        }
    }
    Graph::from_edges(&edges).expect("nonempty")
}

/// Path 0-1-...-(n-1).
pub fn path(n: usize) -> Graph {
    assert!(n >= 2);
    let edges: Vec<_> = (0..n as u64 - 1).map(|i| (i, i + 1)).collect();
    Graph::from_edges(&edges).expect("nonempty")
}

/// Cycle C_n.
pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3);
    let mut edges: Vec<_> = (0..n as u64 - 1).map(|i| (i, i + 1)).collect();
    edges.push((n as u64 - 1, 0));
    Graph::from_edges(&edges).expect("nonempty")
}

/// Star: hub 0 with `leaves` leaves.
pub fn star(leaves: usize) -> Graph {
    assert!(leaves >= 1);
    let edges: Vec<_> = (1..=leaves as u64).map(|l| (0, l)).collect();
    Graph::from_edges(&edges).expect("nonempty")
}

/// The Petersen graph: spectrum 3, 1 (x5), -2 (x4).
pub fn petersen() -> Graph {
    let mut edges = Vec::new();
    for i in 0..5u64 {
        edges.push((i, (i + 1) % 5)); // outer cycle
        edges.push((i + 5, (i + 2) % 5 + 5)); // inner pentagram
        edges.push((i, i + 5)); // spokes
    }
    Graph::from_edges(&edges).expect("nonempty")
}

/// Two triangles joined by a bridge edge.
pub fn barbell() -> Graph {
    Graph::from_edges(&[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3)])
        .expect("nonempty")
}

/// Disjoint union of cliques with the given sizes.
pub fn disjoint_cliques(sizes: &[usize]) -> Graph {
    let mut edges = Vec::new();
    let mut base = 0u64;
    for &s in sizes {
        assert!(s >= 2);
        for u in 0..s as u64 {
            for v in u + 1..s as u64 {
                edges.push((base + u, base + v));
            }
        }
        base += s as u64;
    }
    Graph::from_edges(&edges).expect("nonempty")
}

/// Connected random graph: a random recursive tree plus extra uniform
/// edges until the target average degree is reached.
pub fn erdos_renyi_connected(n: usize, avg_degree: f64, seed: u64) -> Graph {
    assert!(n >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(u64, u64)> = Vec::new();
    for v in 1..n as u64 {
        edges.push((rng.random_range(0..v), v));
    }
    let target = ((avg_degree * n as f64 / 2.0) as usize).max(n - 1);
    while edges.len() < target {
        let u = rng.random_range(0..n as u64);
        let v = rng.random_range(0..n as u64);
        if u != v {
            edges.push((u, v));
        }
    }
    Graph::from_edges(&edges).expect("nonempty")
}

/// Random connected graph on n nodes: random spanning tree plus `extra`
/// uniform extra edges (duplicates collapse, so the realized edge count
/// may be lower).
pub fn random_connected(n: usize, extra: usize, seed: u64) -> Graph {
    erdos_renyi_with_extra(n, extra, seed)
}

fn erdos_renyi_with_extra(n: usize, extra: usize, seed: u64) -> Graph {
    assert!(n >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(u64, u64)> = Vec::new();
    for v in 1..n as u64 {
        edges.push((rng.random_range(0..v), v));
    }
    for _ in 0..extra {
        let u = rng.random_range(0..n as u64);
        let v = rng.random_range(0..n as u64);
        if u != v {
            edges.push((u, v));
        }
    }
    Graph::from_edges(&edges).expect("nonempty")
}

/// Preferential-attachment graph: new nodes attach to `m` existing nodes
/// chosen proportionally to degree.
pub fn barabasi_albert(n: usize, m: usize, seed: u64) -> Graph {
    assert!(m >= 1 && n > m + 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(u64, u64)> = Vec::new();
    // Endpoint pool: each edge contributes both endpoints, so sampling a
    // uniform pool entry is degree-proportional sampling.
    let mut pool: Vec<u64> = Vec::new();
    for u in 0..=m as u64 {
        for v in u + 1..=m as u64 {
            edges.push((u, v));
            pool.push(u);
            pool.push(v);
        }
    }
    for v in m as u64 + 1..n as u64 {
        let mut picked = Vec::with_capacity(m);
        while picked.len() < m {
            let t = pool[rng.random_range(0..pool.len())];
            if !picked.contains(&t) {
                picked.push(t);
            }
        }
        for &t in &picked {
            edges.push((t, v));
            pool.push(t);
            pool.push(v);
        }
    }
    Graph::from_edges(&edges).expect("nonempty")
}

/// Sparse random graph with a planted clique: lambda1 is pinned near
/// clique_size - 1 while the bulk stays small, so alpha is well below 1.
pub fn planted_clique(n: usize, clique_size: usize, avg_degree: f64, seed: u64) -> Graph {
    assert!(clique_size >= 3 && clique_size <= n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(u64, u64)> = Vec::new();
    for v in 1..n as u64 {
        edges.push((rng.random_range(0..v), v));
    }
    let target = ((avg_degree * n as f64 / 2.0) as usize).max(n - 1);
    while edges.len() < target {
        let u = rng.random_range(0..n as u64);
        let v = rng.random_range(0..n as u64);
        if u != v {
            edges.push((u, v));
        }
    }
    for u in 0..clique_size as u64 {
        for v in u + 1..clique_size as u64 {
            edges.push((u, v));
        }
    }
    Graph::from_edges(&edges).expect("nonempty")
}
