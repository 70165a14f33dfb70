//! The simple random walk: configuration, the sliding window of recent
//! nodes/degrees/neighborhoods, and the degree-sum (D) accumulator.
//!
//! A walk of length m takes m draws, each costing one neighbor query
//! (burn-in included: those are real API calls). The first t draws are
//! burn-in and excluded from every accumulator.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{AccessError, GraphAccess, NodeId};

#[derive(Debug, thiserror::Error)]
pub enum WalkError {
    #[error("invalid walk config: {0}")]
    Config(String),
    #[error(transparent)]
    Access(#[from] AccessError),
    #[error("walk stuck at node {0} with no neighbors")]
    Stuck(NodeId),
    #[error("uniform-random start requires full access; supply a start node")]
    NoUniformStart,
    #[error("no post-burn-in steps were taken")]
    NoCountedSteps,
}

/// Where the walk begins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum StartNode {
    /// Uniformly random node; full-access mode only.
    UniformRandom,
    Node(NodeId),
}

/// Walk parameters. `walk_length` counts every draw including burn-in.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct WalkConfig {
    pub walk_length: u64,
    pub burn_in: u64,
    pub seed: u64,
    pub start: StartNode,
}

impl WalkConfig {
    pub fn new(walk_length: u64, burn_in: u64, seed: u64) -> Self {
        WalkConfig { walk_length, burn_in, seed, start: StartNode::UniformRandom }
    }

    /// Default mixing-time proxy: 100 * ceil(log2 n) steps.
    pub fn default_burn_in(n: usize) -> u64 {
        let bits = (usize::BITS - n.max(2).next_power_of_two().leading_zeros() - 1) as u64;
        100 * bits
    }

    pub fn with_start(mut self, start: StartNode) -> Self {
        self.start = start;
        self
    }

    pub fn validate(&self) -> Result<(), WalkError> {
        if self.walk_length <= self.burn_in {
            return Err(WalkError::Config(format!(
                "walk length {} must exceed burn-in {}",
                self.walk_length, self.burn_in
            )));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// WalkWindow
// ---------------------------------------------------------------------------

/// Ring buffer over the most recently completed walk positions: node ids,
/// their degrees, and (for the common-neighbor estimator) their sorted
/// neighbor lists. Slot `back(0)` is the node whose neighborhood was fetched
/// most recently, `back(j)` the node j steps before it.
#[derive(Debug)]
pub struct WalkWindow {
    cap: usize,
    len: usize,
    head: usize, // next write slot
    nodes: Vec<NodeId>,
    degrees: Vec<u32>,
    hoods: Option<Vec<Vec<NodeId>>>,
}

impl WalkWindow {
    /// `depth` is K+1 for a maximum closed-walk length K.
    pub fn new(depth: usize, cache_neighbors: bool) -> Self {
        assert!(depth >= 1);
        WalkWindow {
            cap: depth,
            len: 0,
            head: 0,
            nodes: vec![0; depth],
            degrees: vec![0; depth],
            hoods: cache_neighbors.then(|| vec![Vec::new(); depth]),
        }
    }

    pub fn push(&mut self, node: NodeId, degree: u32, hood: Option<&[NodeId]>) {
        self.nodes[self.head] = node;
        self.degrees[self.head] = degree;
        if let Some(hoods) = &mut self.hoods {
            let slot = &mut hoods[self.head];
            slot.clear();
            if let Some(h) = hood {
                slot.extend_from_slice(h);
            }
        }
        self.head = (self.head + 1) % self.cap;
        self.len = (self.len + 1).min(self.cap);
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    fn slot(&self, back: usize) -> Option<usize> {
        (back < self.len).then(|| (self.head + self.cap - 1 - back) % self.cap)
    }

    /// Node visited `back` completed steps ago (0 = most recent).
    #[inline]
    pub fn node_back(&self, back: usize) -> Option<NodeId> {
        self.slot(back).map(|s| self.nodes[s])
    }

    #[inline]
    pub fn degree_back(&self, back: usize) -> Option<u32> {
        self.slot(back).map(|s| self.degrees[s])
    }

    /// Cached neighborhood, if neighbor caching is enabled.
    #[inline]
    pub fn hood_back(&self, back: usize) -> Option<&[NodeId]> {
        let hoods = self.hoods.as_ref()?;
        self.slot(back).map(|s| hoods[s].as_slice())
    }
}

// ---------------------------------------------------------------------------
// DAccumulator
// ---------------------------------------------------------------------------

/// Running sum of 1/d(r_{i-1}) over counted steps; finalizes to the
/// degree-sum estimate D_est = n * steps / sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct DAccumulator {
    inv_degree_sum: f64,
    steps_counted: u64,
}

impl DAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, degree: u32) {
        debug_assert!(degree > 0);
        self.inv_degree_sum += 1.0 / degree as f64;
        self.steps_counted += 1;
    }

    pub fn steps_counted(&self) -> u64 {
        self.steps_counted
    }

    pub fn inv_degree_sum(&self) -> f64 {
        self.inv_degree_sum
    }

    /// D_est; errors if no steps were counted.
    pub fn estimate(&self, n: usize) -> Result<f64, WalkError> {
        if self.steps_counted == 0 {
            return Err(WalkError::NoCountedSteps);
        }
        Ok(n as f64 * self.steps_counted as f64 / self.inv_degree_sum)
    }
}

// ---------------------------------------------------------------------------
// SamplingRun: drives one walk
// ---------------------------------------------------------------------------

/// Why a walk stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkEnd {
    /// All `walk_length` draws completed.
    Completed,
    /// Query budget ran out; accumulators hold a partial walk.
    BudgetExhausted,
}

/// One completed draw. After `advance` returns an event, `window().back(0)`
/// is the node that was just left (its neighborhood is `left_hood()`), and
/// `drawn` is the node the walk moved to.
#[derive(Debug, Clone, Copy)]
pub struct StepEvent {
    pub drawn: NodeId,
    /// False during burn-in.
    pub counted: bool,
}

pub enum Step {
    Event(StepEvent),
    Done(WalkEnd),
}

/// Owns the moving state of a single walk over a `GraphAccess`.
pub struct SamplingRun<'a, A: GraphAccess> {
    access: &'a mut A,
    cfg: WalkConfig,
    window: WalkWindow,
    rng: ChaCha8Rng,
    d_acc: DAccumulator,
    current: NodeId,
    draws: u64,
    left_hood: Vec<NodeId>,
    trace: Option<Vec<NodeId>>,
}

impl<'a, A: GraphAccess> SamplingRun<'a, A> {
    pub fn new(
        access: &'a mut A,
        cfg: WalkConfig,
        window_depth: usize,
        cache_neighbors: bool,
    ) -> Result<Self, WalkError> {
        cfg.validate()?;
        let n = access.node_count();
        if n < 2 {
            return Err(WalkError::Config("graph must have at least 2 nodes".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let current = match cfg.start {
            StartNode::Node(v) => {
                if v as usize >= n {
                    return Err(WalkError::Config(format!("start node {v} out of range")));
                }
                v
            }
            StartNode::UniformRandom => {
                if !access.supports_uniform_start() {
                    return Err(WalkError::NoUniformStart);
                }
                rng.random_range(0..n) as NodeId
            }
        };
        Ok(SamplingRun {
            access,
            cfg,
            window: WalkWindow::new(window_depth, cache_neighbors),
            rng,
            d_acc: DAccumulator::new(),
            current,
            draws: 0,
            left_hood: Vec::new(),
            trace: None,
        })
    }

    /// Record every visited node id (start node included).
    pub fn record_trace(&mut self) {
        let mut t = Vec::with_capacity(self.cfg.walk_length as usize + 1);
        t.push(self.current);
        self.trace = Some(t);
    }

    /// Take one draw: fetch N(current) (one query), push (current, d, hood)
    /// into the window, accumulate 1/d if past burn-in, move to a uniformly
    /// random neighbor.
    pub fn advance(&mut self) -> Result<Step, WalkError> {
        if self.draws >= self.cfg.walk_length {
            return Ok(Step::Done(WalkEnd::Completed));
        }
        let hood = match self.access.fetch_neighbors(self.current) {
            Ok(h) => h,
            Err(AccessError::BudgetExhausted { .. }) => {
                return Ok(Step::Done(WalkEnd::BudgetExhausted));
            }
            Err(e) => return Err(e.into()),
        };
        if hood.is_empty() {
            return Err(WalkError::Stuck(self.current));
        }
        self.left_hood.clear();
        self.left_hood.extend_from_slice(hood);
        let degree = self.left_hood.len() as u32;

        let cache = self.window.hoods.is_some();
        self.window.push(self.current, degree, cache.then_some(self.left_hood.as_slice()));

        let counted = self.draws >= self.cfg.burn_in;
        if counted {
            self.d_acc.add(degree);
        }
        let drawn = self.left_hood[self.rng.random_range(0..self.left_hood.len())];
        if let Some(trace) = &mut self.trace {
            trace.push(drawn);
        }
        self.current = drawn;
        self.draws += 1;
        Ok(Step::Event(StepEvent { drawn, counted }))
    }

    pub fn window(&self) -> &WalkWindow {
        &self.window
    }

    pub fn node_count(&self) -> usize {
        self.access.node_count()
    }

    /// Neighborhood of `window().node_back(0)`, the node just left.
    pub fn left_hood(&self) -> &[NodeId] {
        &self.left_hood
    }

    pub fn d_accumulator(&self) -> &DAccumulator {
        &self.d_acc
    }

    pub fn counted_steps(&self) -> u64 {
        self.d_acc.steps_counted()
    }

    pub fn draws(&self) -> u64 {
        self.draws
    }

    pub fn queries_used(&self) -> u64 {
        self.access.queries_used()
    }

    pub fn into_trace(self) -> Option<Vec<NodeId>> {
        self.trace
    }
}

/// Re-run the node sequence a config produces, for trace dumps. Determinism
/// guarantees this is exactly the sequence any estimator saw under the same
/// config.
pub fn replay_trace<A: GraphAccess>(
    access: &mut A,
    cfg: &WalkConfig,
) -> Result<Vec<NodeId>, WalkError> {
    let mut run = SamplingRun::new(access, *cfg, 2, false)?;
    run.record_trace();
    loop {
        match run.advance()? {
            Step::Event(_) => {}
            Step::Done(_) => break,
        }
    }
    Ok(run.into_trace().expect("trace recording enabled"))
}
