//! Experiment harness: repeated independent estimator runs at fixed query
//! budgets, relative-error and NRMSE aggregation, and machine-readable
//! result tables (CSV plus a JSON mirror).

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::estimators::{
    cwalker_a, cwalker_b, cwalker_c, naive_lambda1, top_n_sampled, Algorithm,
    EstimateReport,
};
use crate::graph::{load_edge_list, FullAccess, Graph, GraphError, QueryLedger};
use crate::oracle::power_iteration_top2;
use crate::walker::WalkConfig;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid plan: {0}")]
    Plan(String),
    #[error("plan produced an empty table")]
    EmptyTable,
}

fn default_beta() -> f64 {
    0.05
}

fn default_max_k() -> usize {
    30
}

fn default_runs() -> u32 {
    100
}

fn default_true() -> bool {
    true
}

/// One experiment: an estimator, a list of query budgets, and repeated
/// seeded runs per budget. Deserialized from the `bench --plan` JSON file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub graph: PathBuf,
    pub algorithm: Algorithm,
    /// Closed-walk length for the fixed-k algorithms.
    #[serde(default)]
    pub k: Option<usize>,
    /// Eigenvalue count for the top-n algorithm.
    #[serde(default)]
    pub n_eigs: Option<usize>,
    pub budgets: Vec<u64>,
    #[serde(default = "default_runs")]
    pub runs: u32,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default = "default_max_k")]
    pub max_k: usize,
    /// Burn-in override; derived from the node count when absent.
    #[serde(default)]
    pub burn_in: Option<u64>,
    #[serde(default)]
    pub seed_base: u64,
    /// Ground truth for lambda1; computed by power iteration when absent.
    #[serde(default)]
    pub truth_lambda1: Option<f64>,
    #[serde(default)]
    pub truth_lambda2: Option<f64>,
    /// Run on the largest connected component (the experiment convention).
    #[serde(default = "default_true")]
    pub use_lcc: bool,
    #[serde(default)]
    pub workers: Option<usize>,
    /// Record wall-clock per run. Disable for byte-reproducible tables.
    #[serde(default = "default_true")]
    pub measure_runtime: bool,
}

impl ExperimentPlan {
    pub fn from_json_path(path: &Path) -> Result<ExperimentPlan, HarnessError> {
        let text = std::fs::read_to_string(path)?;
        let plan: ExperimentPlan =
            serde_json::from_str(&text).map_err(|e| HarnessError::Plan(e.to_string()))?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.runs < 1 {
            return Err(HarnessError::Plan("runs must be >= 1".into()));
        }
        if self.budgets.is_empty() {
            return Err(HarnessError::Plan("budgets must be non-empty".into()));
        }
        if !self.budgets.windows(2).all(|w| w[0] < w[1]) {
            return Err(HarnessError::Plan("budgets must be strictly increasing".into()));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(HarnessError::Plan(format!("beta must be in (0,1): {}", self.beta)));
        }
        match self.algorithm {
            Algorithm::Naive | Algorithm::A if self.k.is_none() => {
                Err(HarnessError::Plan("fixed-k algorithm requires `k`".into()))
            }
            _ => Ok(()),
        }
    }

    fn spec(&self) -> EstimatorSpec {
        EstimatorSpec {
            algorithm: self.algorithm,
            k: self.k,
            n_eigs: self.n_eigs,
            beta: self.beta,
            max_k: self.max_k,
            burn_in: self.burn_in,
        }
    }
}

/// Everything needed to run one estimator instance against a graph.
#[derive(Debug, Clone, Copy)]
pub struct EstimatorSpec {
    pub algorithm: Algorithm,
    pub k: Option<usize>,
    pub n_eigs: Option<usize>,
    pub beta: f64,
    pub max_k: usize,
    pub burn_in: Option<u64>,
}

impl EstimatorSpec {
    /// One estimator run: the walk length is the budget (burn-in included),
    /// so the run consumes exactly `budget` queries.
    pub fn run(
        &self,
        graph: &Graph,
        budget: u64,
        seed: u64,
    ) -> Result<EstimateReport, String> {
        let burn_in = self.burn_in.unwrap_or_else(|| {
            WalkConfig::default_burn_in(graph.node_count())
        });
        let cfg = WalkConfig::new(budget, burn_in, seed);
        let mut access = FullAccess::new(graph, QueryLedger::with_budget(budget));
        let run = match self.algorithm {
            Algorithm::Naive => {
                naive_lambda1(&mut access, self.k.unwrap_or(3), &cfg)
            }
            Algorithm::A => cwalker_a(&mut access, self.k.unwrap_or(3), &cfg),
            Algorithm::B => cwalker_b(&mut access, self.max_k, self.beta, &cfg),
            Algorithm::C => cwalker_c(&mut access, self.max_k, self.beta, &cfg),
            Algorithm::TopN => top_n_sampled(
                &mut access,
                self.max_k,
                self.n_eigs.unwrap_or(2),
                self.beta,
                &cfg,
            ),
        };
        run.map_err(|e| e.to_string())
    }
}

/// Outcome of `runs` seeded estimator instances at one budget. Failed runs
/// keep their error strings so they are counted, never averaged.
#[derive(Debug)]
pub struct BudgetRuns {
    pub budget: u64,
    pub reports: Vec<Result<EstimateReport, String>>,
    pub runtimes_s: Vec<f64>,
}

impl BudgetRuns {
    pub fn successes(&self) -> impl Iterator<Item = &EstimateReport> {
        self.reports.iter().filter_map(|r| r.as_ref().ok())
    }

    pub fn missing(&self) -> u32 {
        self.reports.iter().filter(|r| r.is_err()).count() as u32
    }
}

/// Run `runs` estimator instances concurrently (seed = seed_base +
/// run_index), assembling results by run index regardless of completion
/// order.
pub fn run_budget(
    graph: &Graph,
    spec: &EstimatorSpec,
    budget: u64,
    runs: u32,
    seed_base: u64,
    workers: usize,
    measure_runtime: bool,
) -> BudgetRuns {
    let workers = workers.max(1).min(runs as usize);
    let next = AtomicU32::new(0);
    let slots: Mutex<Vec<Option<(Result<EstimateReport, String>, f64)>>> =
        Mutex::new(vec![None; runs as usize]);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= runs {
                    break;
                }
                let started = Instant::now();
                let report = spec.run(graph, budget, seed_base + idx as u64);
                let elapsed = if measure_runtime {
                    started.elapsed().as_secs_f64()
                } else {
                    0.0
                };
                slots.lock().expect("no poisoned runs").as_mut_slice()[idx as usize] =
                    Some((report, elapsed));
            });
        }
    });
    let mut reports = Vec::with_capacity(runs as usize);
    let mut runtimes_s = Vec::with_capacity(runs as usize);
    for slot in slots.into_inner().expect("no poisoned runs") {
        let (report, runtime) = slot.expect("every run index filled");
        reports.push(report);
        runtimes_s.push(runtime);
    }
    BudgetRuns { budget, reports, runtimes_s }
}

/// One aggregated line of the results table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricRow {
    pub graph: String,
    pub algorithm: Algorithm,
    pub q: u64,
    pub runs: u32,
    pub mean_estimate: f64,
    pub truth: f64,
    pub rel_error: f64,
    pub nrmse: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean_runtime_s: f64,
    pub missing_runs: u32,
}

/// Aggregate one budget's runs against the ground truth.
pub fn metric_row(
    graph_name: &str,
    algorithm: Algorithm,
    runs: &BudgetRuns,
    truth: f64,
) -> MetricRow {
    let estimates: Vec<f64> = runs.successes().map(|r| r.lambda1).collect();
    let n = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / n;
    let rel_error = (mean - truth) / truth;
    let mse = estimates.iter().map(|e| (e - truth).powi(2)).sum::<f64>() / n;
    let nrmse = mse.sqrt() / truth;
    let sample_var = if estimates.len() < 2 {
        0.0
    } else {
        estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0)
    };
    let half = 1.96 * (sample_var / n).sqrt();
    let mean_runtime_s = runs.runtimes_s.iter().sum::<f64>() / runs.runtimes_s.len() as f64;
    MetricRow {
        graph: graph_name.to_string(),
        algorithm,
        q: runs.budget,
        runs: runs.reports.len() as u32,
        mean_estimate: mean,
        truth,
        rel_error,
        nrmse,
        ci_low: mean - half,
        ci_high: mean + half,
        mean_runtime_s,
        missing_runs: runs.missing(),
    }
}

/// Execute a whole plan: load the graph, take the LCC, resolve the ground
/// truth, and aggregate every budget.
pub fn run_plan(plan: &ExperimentPlan) -> Result<Vec<MetricRow>, HarnessError> {
    plan.validate()?;
    let (graph, _) = load_edge_list(&plan.graph)?;
    let graph = if plan.use_lcc { graph.largest_connected_component() } else { graph };
    let truth = match plan.truth_lambda1 {
        Some(t) => t,
        None => power_iteration_top2(&graph, 1e-8, 200_000).lambda1(),
    };
    let name = plan
        .graph
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "graph".into());
    let workers = plan
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |p| p.get()));
    let spec = plan.spec();
    let mut rows = Vec::with_capacity(plan.budgets.len());
    for &budget in &plan.budgets {
        let runs = run_budget(
            &graph,
            &spec,
            budget,
            plan.runs,
            plan.seed_base,
            workers,
            plan.measure_runtime,
        );
        rows.push(metric_row(&name, plan.algorithm, &runs, truth));
    }
    Ok(rows)
}

pub const CSV_HEADER: &str = "graph,algorithm,Q,runs,mean_estimate,truth,rel_error,\
nrmse,ci_low,ci_high,mean_runtime_s,missing_runs";

/// Write the fixed-schema CSV. Floats use shortest-roundtrip formatting,
/// so identical tables produce identical bytes.
pub fn write_csv<W: Write>(rows: &[MetricRow], mut out: W) -> Result<(), HarnessError> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.graph,
            r.algorithm,
            r.q,
            r.runs,
            r.mean_estimate,
            r.truth,
            r.rel_error,
            r.nrmse,
            r.ci_low,
            r.ci_high,
            r.mean_runtime_s,
            r.missing_runs
        )?;
    }
    Ok(())
}

/// Emit the CSV and its JSON mirror; deterministic row order is the
/// caller's input order.
pub fn emit_results(
    rows: &[MetricRow],
    csv_path: &Path,
    json_path: &Path,
) -> Result<(), HarnessError> {
    if rows.is_empty() {
        return Err(HarnessError::EmptyTable);
    }
    let mut csv = BufWriter::new(File::create(csv_path)?);
    write_csv(rows, &mut csv)?;
    csv.flush()?;
    let json = serde_json::to_string_pretty(rows).expect("rows serialize");
    let mut jf = BufWriter::new(File::create(json_path)?);
    jf.write_all(json.as_bytes())?;
    jf.write_all(b"\n")?;
    jf.flush()?;
    Ok(())
}
