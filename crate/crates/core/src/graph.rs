//! Undirected simple graphs in compressed sparse row form, plus the
//! query-metered access views used by the sampling estimators.
//!
//! Graphs are loaded from SNAP-style edge lists: duplicate edges are
//! collapsed, self-loops dropped, direction ignored, and node ids densely
//! re-indexed 0..n-1 in ascending original-id order (so a write/reload
//! round-trip reproduces the same graph). All experiments run on the
//! largest connected component.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

/// Dense internal node id.
pub type NodeId = u32;

#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed edge list at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("graph has no edges after normalization")]
    Empty,
    #[error("node id {0} out of range (graph has {1} nodes)")]
    NodeOutOfRange(NodeId, usize),
}

// ---------------------------------------------------------------------------
// Graph
// ---------------------------------------------------------------------------

/// Immutable CSR adjacency of an undirected simple graph.
///
/// Neighbor slices are sorted strictly ascending, every edge appears in both
/// endpoint slices, and there are no self-loops or duplicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<NodeId>,
    edge_count: usize,
    max_degree: usize,
    /// Dense id -> id in the source edge list, ascending.
    original_ids: Vec<u64>,
}

/// What `load_edge_list` dropped while normalizing the input.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LoadSummary {
    pub nodes: usize,
    pub edges: usize,
    pub dropped_self_loops: usize,
    pub dropped_duplicates: usize,
}

impl Graph {
    /// Build a graph from raw (possibly directed, duplicated, self-looping)
    /// node-id pairs, applying the same normalization as the file loader.
    pub fn from_edges(pairs: &[(u64, u64)]) -> Result<Graph, GraphError> {
        Ok(Self::build(pairs.to_vec())?.0)
    }

    fn build(pairs: Vec<(u64, u64)>) -> Result<(Graph, LoadSummary), GraphError> {
        let mut dropped_self_loops = 0usize;
        let mut edges: Vec<(u64, u64)> = Vec::with_capacity(pairs.len());
        for (u, v) in pairs {
            if u == v {
                dropped_self_loops += 1;
            } else {
                edges.push((u.min(v), u.max(v)));
            }
        }
        if edges.is_empty() {
            return Err(GraphError::Empty);
        }

        edges.sort_unstable();
        let before = edges.len();
        edges.dedup();
        let dropped_duplicates = before - edges.len();

        // Dense ids in ascending original-id order.
        let mut ids: Vec<u64> = Vec::with_capacity(edges.len() * 2);
        for &(u, v) in &edges {
            ids.push(u);
            ids.push(v);
        }
        ids.sort_unstable();
        ids.dedup();
        let n = ids.len();
        let dense = |orig: u64| ids.binary_search(&orig).expect("id present") as NodeId;

        let mut offsets = vec![0usize; n + 1];
        for &(u, v) in &edges {
            offsets[dense(u) as usize + 1] += 1;
            offsets[dense(v) as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut neighbors = vec![0 as NodeId; edges.len() * 2];
        for &(u, v) in &edges {
            let (du, dv) = (dense(u), dense(v));
            neighbors[cursor[du as usize]] = dv;
            cursor[du as usize] += 1;
            neighbors[cursor[dv as usize]] = du;
            cursor[dv as usize] += 1;
        }
        for v in 0..n {
            neighbors[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        let max_degree = (0..n).map(|v| offsets[v + 1] - offsets[v]).max().unwrap_or(0);

        let graph = Graph {
            offsets,
            neighbors,
            edge_count: edges.len(),
            max_degree,
            original_ids: ids,
        };
        let summary = LoadSummary {
            nodes: graph.node_count(),
            edges: graph.edge_count,
            dropped_self_loops,
            dropped_duplicates,
        };
        Ok((graph, summary))
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Sum of all degrees; equals 2|E|.
    pub fn degree_sum(&self) -> usize {
        self.neighbors.len()
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.offsets[v as usize + 1] - self.offsets[v as usize]
    }

    /// Sorted neighbor slice of `v`.
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.neighbors[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    /// Original (edge-list) id of a dense node id.
    pub fn original_id(&self, v: NodeId) -> u64 {
        self.original_ids[v as usize]
    }

    pub fn original_ids(&self) -> &[u64] {
        &self.original_ids
    }

    fn check_node(&self, v: NodeId) -> Result<(), GraphError> {
        if (v as usize) < self.node_count() {
            Ok(())
        } else {
            Err(GraphError::NodeOutOfRange(v, self.node_count()))
        }
    }

    /// True iff `u` is a neighbor of `v` (binary search over the sorted slice).
    pub fn contains_neighbor(&self, v: NodeId, u: NodeId) -> Result<bool, GraphError> {
        self.check_node(v)?;
        self.check_node(u)?;
        Ok(sorted_contains(self.neighbors(v), u))
    }

    /// |N(u) ∩ N(v)| via sorted-list intersection; `u == v` returns d(u).
    pub fn common_neighbor_count(&self, u: NodeId, v: NodeId) -> Result<usize, GraphError> {
        self.check_node(u)?;
        self.check_node(v)?;
        Ok(intersection_size(self.neighbors(u), self.neighbors(v)))
    }

    /// Write "u v" lines (original ids, u <= v, sorted) so that reloading
    /// reproduces this graph exactly.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<(), GraphError> {
        for v in 0..self.node_count() as NodeId {
            for &u in self.neighbors(v) {
                if v <= u {
                    writeln!(out, "{} {}", self.original_id(v), self.original_id(u))?;
                }
            }
        }
        Ok(())
    }

    pub fn write_edge_list_path(&self, path: &Path) -> Result<(), GraphError> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_edge_list(&mut w)?;
        w.flush()?;
        Ok(())
    }

    /// Induced subgraph on the largest BFS-reachable component, re-indexed
    /// densely. Ties between equal-size components break toward the one
    /// containing the smallest original node id.
    pub fn largest_connected_component(&self) -> Graph {
        let n = self.node_count();
        let mut component = vec![u32::MAX; n];
        let mut best: Option<(usize, NodeId, u32)> = None; // (size, first node, comp id)
        let mut queue = std::collections::VecDeque::new();
        let mut next_comp = 0u32;
        for start in 0..n as NodeId {
            if component[start as usize] != u32::MAX {
                continue;
            }
            let comp = next_comp;
            next_comp += 1;
            component[start as usize] = comp;
            queue.push_back(start);
            let mut size = 0usize;
            while let Some(v) = queue.pop_front() {
                size += 1;
                for &u in self.neighbors(v) {
                    if component[u as usize] == u32::MAX {
                        component[u as usize] = comp;
                        queue.push_back(u);
                    }
                }
            }
            // Dense ids ascend with original ids, so the first unvisited start
            // node is also the component's smallest original id.
            if best.map_or(true, |(s, _, _)| size > s) {
                best = Some((size, start, comp));
            }
        }
        let (_, _, comp) = best.expect("graph has at least one node");

        let keep: Vec<NodeId> =
            (0..n as NodeId).filter(|&v| component[v as usize] == comp).collect();
        let mut remap = vec![u32::MAX; n];
        for (new, &old) in keep.iter().enumerate() {
            remap[old as usize] = new as NodeId;
        }

        let mut offsets = Vec::with_capacity(keep.len() + 1);
        offsets.push(0usize);
        let mut neighbors = Vec::new();
        for &old in &keep {
            // The remap is monotone, so the slice stays sorted.
            neighbors.extend(self.neighbors(old).iter().map(|&u| remap[u as usize]));
            offsets.push(neighbors.len());
        }
        let max_degree =
            (0..keep.len()).map(|v| offsets[v + 1] - offsets[v]).max().unwrap_or(0);
        let edge_count = neighbors.len() / 2;
        let original_ids = keep.iter().map(|&old| self.original_ids[old as usize]).collect();
        Graph { offsets, neighbors, edge_count, max_degree, original_ids }
    }
}

/// Load a SNAP-style edge list: '#'-prefixed comment lines, one whitespace
/// separated "u v" pair per line.
pub fn load_edge_list(path: &Path) -> Result<(Graph, LoadSummary), GraphError> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);
    let mut pairs = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tok = trimmed.split_whitespace();
        let parse = |t: Option<&str>| -> Result<u64, GraphError> {
            let t = t.ok_or_else(|| GraphError::Parse {
                line: idx + 1,
                reason: "expected two node ids".into(),
            })?;
            t.parse::<u64>().map_err(|e| GraphError::Parse {
                line: idx + 1,
                reason: format!("bad node id {t:?}: {e}"),
            })
        };
        let u = parse(tok.next())?;
        let v = parse(tok.next())?;
        if tok.next().is_some() {
            return Err(GraphError::Parse {
                line: idx + 1,
                reason: "trailing tokens after node pair".into(),
            });
        }
        pairs.push((u, v));
    }
    Graph::build(pairs)
}

// ---------------------------------------------------------------------------
// Sorted-slice primitives
// ---------------------------------------------------------------------------

/// Binary search membership in a sorted neighbor slice.
#[inline]
pub fn sorted_contains(hood: &[NodeId], u: NodeId) -> bool {
    hood.binary_search(&u).is_ok()
}

/// Size of the intersection of two strictly ascending slices. Galloping
/// (binary search from the smaller side) when the sizes are lopsided,
/// linear merge otherwise.
pub fn intersection_size(a: &[NodeId], b: &[NodeId]) -> usize {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if small.is_empty() {
        return 0;
    }
    if large.len() / small.len() >= 16 {
        return small.iter().filter(|&&x| sorted_contains(large, x)).count();
    }
    let mut count = 0;
    let (mut i, mut j) = (0, 0);
    while i < small.len() && j < large.len() {
        match small[i].cmp(&large[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

// ---------------------------------------------------------------------------
// Query accounting and access views
// ---------------------------------------------------------------------------

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum AccessError {
    #[error("query budget exhausted after {used} queries (budget {budget})")]
    BudgetExhausted { used: u64, budget: u64 },
    #[error("node id {0} out of range")]
    OutOfRange(NodeId),
    #[error("degree of node {0} unavailable: neighborhood not fetched this step")]
    DegreeUnavailable(NodeId),
}

/// Monotone counter of neighborhood fetches with an optional hard budget.
/// A fetch that would exceed the budget fails before touching the graph.
#[derive(Debug, Clone)]
pub struct QueryLedger {
    used: u64,
    budget: Option<u64>,
}

impl QueryLedger {
    pub fn unbounded() -> Self {
        QueryLedger { used: 0, budget: None }
    }

    pub fn with_budget(budget: u64) -> Self {
        QueryLedger { used: 0, budget: Some(budget) }
    }

    pub fn charge(&mut self) -> Result<(), AccessError> {
        if let Some(b) = self.budget {
            if self.used >= b {
                return Err(AccessError::BudgetExhausted { used: self.used, budget: b });
            }
        }
        self.used += 1;
        Ok(())
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn budget(&self) -> Option<u64> {
        self.budget
    }
}

/// Neighbor-query interface the estimators are written against.
///
/// `fetch_neighbors` costs one query from the ledger; `node_count` is free
/// (the toolkit assumes |V| is known); `degree` is free only where the
/// implementation can answer without a fresh fetch.
pub trait GraphAccess {
    fn node_count(&self) -> usize;

    /// Sorted neighbors of `v`; charges exactly one query.
    fn fetch_neighbors(&mut self, v: NodeId) -> Result<&[NodeId], AccessError>;

    /// Degree without charging a query, where permitted.
    fn degree(&self, v: NodeId) -> Result<usize, AccessError>;

    fn queries_used(&self) -> u64;

    /// Whether a uniformly random start node can be drawn (requires global
    /// knowledge; restricted implementations refuse).
    fn supports_uniform_start(&self) -> bool;
}

/// Full local access: answers everything, still meters queries so budget
/// experiments are comparable with the restricted view.
pub struct FullAccess<'g> {
    graph: &'g Graph,
    ledger: QueryLedger,
}

impl<'g> FullAccess<'g> {
    pub fn new(graph: &'g Graph, ledger: QueryLedger) -> Self {
        FullAccess { graph, ledger }
    }

    pub fn unbounded(graph: &'g Graph) -> Self {
        Self::new(graph, QueryLedger::unbounded())
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }
}

impl GraphAccess for FullAccess<'_> {
    fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    fn fetch_neighbors(&mut self, v: NodeId) -> Result<&[NodeId], AccessError> {
        if v as usize >= self.graph.node_count() {
            return Err(AccessError::OutOfRange(v));
        }
        self.ledger.charge()?;
        Ok(self.graph.neighbors(v))
    }

    fn degree(&self, v: NodeId) -> Result<usize, AccessError> {
        if v as usize >= self.graph.node_count() {
            return Err(AccessError::OutOfRange(v));
        }
        Ok(self.graph.degree(v))
    }

    fn queries_used(&self) -> u64 {
        self.ledger.used()
    }

    fn supports_uniform_start(&self) -> bool {
        true
    }
}

/// Restricted API view: only per-node neighbor queries, no global questions.
/// Degree is answered free only for the most recently fetched node.
pub struct RestrictedAccess<'g> {
    graph: &'g Graph,
    ledger: QueryLedger,
    last_fetched: Option<NodeId>,
}

impl<'g> RestrictedAccess<'g> {
    pub fn new(graph: &'g Graph, ledger: QueryLedger) -> Self {
        RestrictedAccess { graph, ledger, last_fetched: None }
    }
}

impl GraphAccess for RestrictedAccess<'_> {
    fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    fn fetch_neighbors(&mut self, v: NodeId) -> Result<&[NodeId], AccessError> {
        if v as usize >= self.graph.node_count() {
            return Err(AccessError::OutOfRange(v));
        }
        self.ledger.charge()?;
        self.last_fetched = Some(v);
        Ok(self.graph.neighbors(v))
    }

    fn degree(&self, v: NodeId) -> Result<usize, AccessError> {
        if self.last_fetched == Some(v) {
            Ok(self.graph.degree(v))
        } else {
            Err(AccessError::DegreeUnavailable(v))
        }
    }

    fn queries_used(&self) -> u64 {
        self.ledger.used()
    }

    fn supports_uniform_start(&self) -> bool {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(pairs: &[(u64, u64)]) -> Graph {
        Graph::from_edges(pairs).unwrap()
    }

    #[test]
    fn triangle_loads() {
        let g = graph(&[(0, 1), (1, 2), (2, 0)]);
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert!((0..3).all(|v| g.degree(v) == 2));
        assert_eq!(g.degree_sum(), 6);
        assert_eq!(g.max_degree(), 2);
    }

    #[test]
    fn normalization_drops_duplicates_and_loops() {
        let (g, summary) = Graph::build(vec![(0, 1), (1, 0), (3, 3)]).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(summary.dropped_duplicates, 1);
        assert_eq!(summary.dropped_self_loops, 1);
        // Node 3 only appeared in a self-loop and is gone entirely.
        assert_eq!(g.original_ids(), &[0, 1]);
    }

    #[test]
    fn load_edge_list_parses_snap_format() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "# comment line").unwrap();
        writeln!(f, "10 20").unwrap();
        writeln!(f, "20\t30").unwrap();
        writeln!(f, "30 10").unwrap();
        let (g, s) = load_edge_list(f.path()).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(s.dropped_duplicates + s.dropped_self_loops, 0);
        assert_eq!(g.original_ids(), &[10, 20, 30]);
    }

    #[test]
    fn load_edge_list_reports_bad_line() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "0 1").unwrap();
        writeln!(f, "2 x").unwrap();
        let err = load_edge_list(f.path()).unwrap_err();
        match err {
            GraphError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn empty_graph_is_an_error() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "# nothing but comments").unwrap();
        assert!(matches!(load_edge_list(f.path()), Err(GraphError::Empty)));
        assert!(matches!(Graph::from_edges(&[(5, 5)]), Err(GraphError::Empty)));
    }

    #[test]
    fn lcc_picks_largest_component() {
        // Triangle plus isolated edge: 5 nodes total.
        let g = graph(&[(0, 1), (1, 2), (2, 0), (10, 11)]);
        let lcc = g.largest_connected_component();
        assert_eq!(lcc.node_count(), 3);
        assert_eq!(lcc.edge_count(), 3);
        assert_eq!(lcc.original_ids(), &[0, 1, 2]);
    }

    #[test]
    fn lcc_of_connected_graph_is_identity() {
        let g = graph(&[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let lcc = g.largest_connected_component();
        assert_eq!(lcc, g);
    }

    #[test]
    fn lcc_tie_breaks_on_smallest_original_id() {
        // Two 2-node components; the one containing original id 1 wins.
        let g = graph(&[(5, 9), (1, 7)]);
        let lcc = g.largest_connected_component();
        assert_eq!(lcc.node_count(), 2);
        assert_eq!(lcc.original_ids(), &[1, 7]);
    }

    #[test]
    fn contains_neighbor_cases() {
        let tri = graph(&[(0, 1), (1, 2), (2, 0)]);
        assert!(tri.contains_neighbor(0, 1).unwrap());
        // Triangle with pendant node 3 attached to 0.
        let pend = graph(&[(0, 1), (1, 2), (2, 0), (0, 3)]);
        assert!(!pend.contains_neighbor(1, 3).unwrap());
        let path = graph(&[(0, 1), (1, 2)]);
        assert!(!path.contains_neighbor(0, 2).unwrap());
        assert!(path.contains_neighbor(0, 9).is_err());
    }

    #[test]
    fn common_neighbor_counts() {
        let k4 = graph(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(k4.common_neighbor_count(0, 1).unwrap(), 2);
        assert_eq!(k4.common_neighbor_count(0, 0).unwrap(), 3);
        let star = graph(&[(0, 1), (0, 2), (0, 3), (0, 4)]);
        assert_eq!(star.common_neighbor_count(1, 2).unwrap(), 1);
    }

    #[test]
    fn round_trip_through_edge_list() {
        let g = graph(&[(3, 17), (17, 4), (4, 3), (4, 99), (99, 17)]);
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(&buf).unwrap();
        let (g2, _) = load_edge_list(f.path()).unwrap();
        assert_eq!(g, g2);
    }

    #[test]
    fn ledger_enforces_budget_before_fetching() {
        let g = graph(&[(0, 1), (1, 2)]);
        let mut acc = RestrictedAccess::new(&g, QueryLedger::with_budget(2));
        assert!(acc.fetch_neighbors(0).is_ok());
        assert!(acc.fetch_neighbors(1).is_ok());
        let err = acc.fetch_neighbors(2).unwrap_err();
        assert!(matches!(err, AccessError::BudgetExhausted { used: 2, budget: 2 }));
        assert_eq!(acc.queries_used(), 2);
    }

    #[test]
    fn restricted_degree_only_for_fetched_node() {
        let g = graph(&[(0, 1), (1, 2)]);
        let mut acc = RestrictedAccess::new(&g, QueryLedger::unbounded());
        assert!(acc.degree(1).is_err());
        acc.fetch_neighbors(1).unwrap();
        assert_eq!(acc.degree(1).unwrap(), 2);
        assert!(acc.degree(0).is_err());
        assert!(!acc.supports_uniform_start());
    }

    #[test]
    fn intersection_size_matches_naive() {
        let a: Vec<NodeId> = vec![1, 4, 6, 9, 120, 300];
        let b: Vec<NodeId> = (0..400).collect();
        let naive = a.iter().filter(|x| b.contains(x)).count();
        assert_eq!(intersection_size(&a, &b), naive);
        assert_eq!(intersection_size(&b, &a), naive);
        assert_eq!(intersection_size(&[], &a), 0);
    }
}
