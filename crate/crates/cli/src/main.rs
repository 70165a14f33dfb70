//! Command-line entry point: load graphs, run exact solvers, run the
//! sampling estimators, and drive benchmark plans.
//!
//! Every invocation writes a single JSON (or CSV) artifact that embeds the
//! fully resolved configuration and the toolkit version, so results are
//! reproducible from the output alone. Exit codes: 0 success, 2 config
//! error, 3 data error, 4 estimation failure.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cwalker_core::estimators::{
    cwalker_a, cwalker_b, cwalker_c, naive_lambda1, top_n_sampled, Algorithm,
    EstimateError, EstimateReport,
};
use cwalker_core::graph::{load_edge_list, FullAccess, Graph, LoadSummary, QueryLedger};
use cwalker_core::harness::{self, ExperimentPlan};
use cwalker_core::oracle::{dense_spectrum, power_iteration_top2, Spectrum, DENSE_NODE_CAP};
use cwalker_core::walker::{replay_trace, StartNode, WalkConfig, WalkError};
use cwalker_core::VERSION;

#[derive(Parser)]
#[command(
    name = "cwalker",
    version,
    about = "Closed-walk sampling estimators for the top adjacency eigenvalues of large graphs"
)]
struct Cli {
    /// Stderr verbosity.
    #[arg(long, global = true, value_enum, default_value_t = LogLevel::Info)]
    log_level: LogLevel,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, PartialOrd, ValueEnum)]
enum LogLevel {
    Error,
    Info,
    Debug,
}

#[derive(Subcommand)]
enum Command {
    /// Load and normalize an edge list, reporting what was dropped and the
    /// size of the largest connected component.
    LoadReport(LoadReportArgs),
    /// Exact top eigenvalues (dense Jacobi for small graphs, shifted power
    /// iteration with deflation for large ones).
    Exact(ExactArgs),
    /// Run one sampling estimator and emit its report.
    Estimate(EstimateArgs),
    /// Execute a benchmark plan: repeated seeded runs at fixed budgets.
    Bench(BenchArgs),
}

#[derive(Args)]
struct LoadReportArgs {
    /// SNAP-style edge list ('#' comments, "u v" per line).
    #[arg(long)]
    graph: PathBuf,
    /// Output JSON path; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExactArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ExactMethod::Auto)]
    method: ExactMethod,
    /// Convergence tolerance on successive Rayleigh quotients.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iters: u64,
    /// Operate on the whole graph instead of its largest component.
    #[arg(long)]
    no_lcc: bool,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum ExactMethod {
    Auto,
    Dense,
    Power,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    algorithm: Algorithm,
    /// Closed-walk length for the fixed-k algorithms (naive, a).
    #[arg(long)]
    k: Option<usize>,
    /// Maximum closed-walk length K for the adaptive algorithms.
    #[arg(long, default_value_t = 30)]
    max_k: usize,
    /// Accuracy target bounding alpha^k.
    #[arg(long, default_value_t = 0.05)]
    beta: f64,
    /// Eigenvalue count for --algorithm topn.
    #[arg(long)]
    n_eigs: Option<usize>,
    /// Total walk draws m (burn-in included). Defaults to the budget.
    #[arg(long)]
    walk_length: Option<u64>,
    /// Burn-in t; defaults to 100 * ceil(log2 n).
    #[arg(long)]
    burn_in: Option<u64>,
    /// Query budget Q (each draw costs one neighbor query).
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Start node (original edge-list id); uniform random when absent.
    #[arg(long)]
    start_node: Option<u64>,
    /// Dump the visited node sequence (original ids, one per line).
    #[arg(long)]
    trace_out: Option<PathBuf>,
    /// Operate on the whole graph instead of its largest component.
    #[arg(long)]
    no_lcc: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// JSON experiment plan.
    #[arg(long)]
    plan: PathBuf,
    /// CSV output path.
    #[arg(long, default_value = "results.csv")]
    csv: PathBuf,
    /// JSON mirror path (rows plus resolved plan and version).
    #[arg(long, default_value = "results.json")]
    json: PathBuf,
}

// ---------------------------------------------------------------------------
// Error-to-exit-code mapping
// ---------------------------------------------------------------------------

enum CliError {
    Config(String),
    Data(String),
    Estimation(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Data(_) => "data",
            CliError::Estimation(_) => "estimation",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Data(m) | CliError::Estimation(m) => m,
        }
    }

    fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Estimation(_) => 4,
        }
    }
}

impl From<EstimateError> for CliError {
    fn from(e: EstimateError) -> Self {
        match &e {
            EstimateError::Config(_) => CliError::Config(e.to_string()),
            EstimateError::Walk(WalkError::Config(_))
            | EstimateError::Walk(WalkError::NoUniformStart) => {
                CliError::Config(e.to_string())
            }
            EstimateError::NoClosedWalks { .. } | EstimateError::AllKMissing => {
                CliError::Estimation(e.to_string())
            }
            EstimateError::Walk(_) => CliError::Data(e.to_string()),
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(err) => {
            eprintln!(
                "{}",
                serde_json::json!({ "error": err.message(), "kind": err.kind() })
            );
            std::process::exit(err.exit_code());
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::LoadReport(args) => load_report(args),
        Command::Exact(args) => exact(args, cli.log_level),
        Command::Estimate(args) => estimate(args, cli.log_level),
        Command::Bench(args) => bench(args, cli.log_level),
    }
}

fn load_graph(path: &Path) -> Result<(Graph, LoadSummary), CliError> {
    load_edge_list(path).map_err(|e| CliError::Data(e.to_string()))
}

fn write_output(output: Option<&Path>, payload: &str) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, payload)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{payload}");
            Ok(())
        }
    }
}

fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

// ---------------------------------------------------------------------------
// load-report
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct LoadReportOut {
    nodes: usize,
    edges: usize,
    dropped_self_loops: usize,
    dropped_duplicates: usize,
    lcc_nodes: usize,
    lcc_edges: usize,
    config: LoadReportConfig,
    version: &'static str,
}

#[derive(Serialize)]
struct LoadReportConfig {
    graph: String,
}

fn load_report(args: LoadReportArgs) -> Result<(), CliError> {
    let (graph, summary) = load_graph(&args.graph)?;
    let lcc = graph.largest_connected_component();
    let out = LoadReportOut {
        nodes: summary.nodes,
        edges: summary.edges,
        dropped_self_loops: summary.dropped_self_loops,
        dropped_duplicates: summary.dropped_duplicates,
        lcc_nodes: lcc.node_count(),
        lcc_edges: lcc.edge_count(),
        config: LoadReportConfig { graph: args.graph.display().to_string() },
        version: VERSION,
    };
    write_output(args.output.as_deref(), &to_pretty(&out))
}

// ---------------------------------------------------------------------------
// exact
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct ExactOut {
    lambda1: f64,
    lambda2: Option<f64>,
    lambda3: Option<f64>,
    residuals: Vec<f64>,
    iterations: u64,
    method: String,
    converged: bool,
    config: ExactConfig,
    version: &'static str,
}

#[derive(Serialize)]
struct ExactConfig {
    graph: String,
    method: String,
    tol: f64,
    max_iters: u64,
    use_lcc: bool,
    nodes: usize,
    edges: usize,
}

fn exact(args: ExactArgs, log: LogLevel) -> Result<(), CliError> {
    if args.tol <= 0.0 {
        return Err(CliError::Config("tol must be positive".into()));
    }
    let (graph, _) = load_graph(&args.graph)?;
    let graph = if args.no_lcc { graph } else { graph.largest_connected_component() };
    let method = match args.method {
        ExactMethod::Auto if graph.node_count() <= 500 => ExactMethod::Dense,
        ExactMethod::Auto => ExactMethod::Power,
        m => m,
    };
    if log >= LogLevel::Info {
        eprintln!(
            "exact: {} nodes, {} edges, method {}",
            graph.node_count(),
            graph.edge_count(),
            if method == ExactMethod::Dense { "dense" } else { "power-deflation" }
        );
    }
    let spectrum: Spectrum = match method {
        ExactMethod::Dense => {
            if graph.node_count() > DENSE_NODE_CAP {
                return Err(CliError::Config(format!(
                    "dense method capped at {DENSE_NODE_CAP} nodes; use --method power"
                )));
            }
            dense_spectrum(&graph).map_err(|e| CliError::Data(e.to_string()))?
        }
        ExactMethod::Power | ExactMethod::Auto => {
            power_iteration_top2(&graph, args.tol, args.max_iters)
        }
    };
    let out = ExactOut {
        lambda1: spectrum.lambda1(),
        lambda2: spectrum.lambda2(),
        lambda3: spectrum.lambda3(),
        residuals: spectrum.residuals.clone(),
        iterations: spectrum.iterations,
        method: match spectrum.method {
            cwalker_core::SpectrumMethod::Dense => "dense".into(),
            cwalker_core::SpectrumMethod::PowerDeflation => "power-deflation".into(),
        },
        converged: spectrum.converged,
        config: ExactConfig {
            graph: args.graph.display().to_string(),
            method: match method {
                ExactMethod::Dense => "dense".into(),
                _ => "power-deflation".into(),
            },
            tol: args.tol,
            max_iters: args.max_iters,
            use_lcc: !args.no_lcc,
            nodes: graph.node_count(),
            edges: graph.edge_count(),
        },
        version: VERSION,
    };
    write_output(args.output.as_deref(), &to_pretty(&out))
}

// ---------------------------------------------------------------------------
// estimate
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct EstimateOut {
    report: EstimateReport,
    config: EstimateConfig,
    version: &'static str,
}

#[derive(Serialize)]
struct EstimateConfig {
    graph: String,
    algorithm: Algorithm,
    k: Option<usize>,
    max_k: usize,
    beta: f64,
    n_eigs: Option<usize>,
    walk_length: u64,
    burn_in: u64,
    budget: Option<u64>,
    seed: u64,
    start_node: Option<u64>,
    use_lcc: bool,
    nodes: usize,
    edges: usize,
}

fn estimate(args: EstimateArgs, log: LogLevel) -> Result<(), CliError> {
    let (graph, _) = load_graph(&args.graph)?;
    let graph = if args.no_lcc { graph } else { graph.largest_connected_component() };
    let n = graph.node_count();

    let walk_length = match (args.walk_length, args.budget) {
        (Some(m), _) => m,
        (None, Some(q)) => q,
        (None, None) => {
            return Err(CliError::Config(
                "one of --walk-length or --budget is required".into(),
            ))
        }
    };
    let burn_in = args.burn_in.unwrap_or_else(|| WalkConfig::default_burn_in(n));
    if walk_length <= burn_in {
        return Err(CliError::Config(format!(
            "walk length {walk_length} must exceed burn-in {burn_in}"
        )));
    }
    let start = match args.start_node {
        None => StartNode::UniformRandom,
        Some(orig) => {
            let dense = graph.original_ids().binary_search(&orig).map_err(|_| {
                CliError::Config(format!("start node {orig} is not in the working graph"))
            })?;
            StartNode::Node(dense as u32)
        }
    };
    let cfg = WalkConfig { walk_length, burn_in, seed: args.seed, start };
    let ledger = match args.budget {
        Some(q) => QueryLedger::with_budget(q),
        None => QueryLedger::unbounded(),
    };
    if log >= LogLevel::Info {
        eprintln!(
            "estimate: algorithm {}, n {}, m {}, t {}, seed {}",
            args.algorithm, n, walk_length, burn_in, args.seed
        );
    }
    let mut access = FullAccess::new(&graph, ledger);
    let report = match args.algorithm {
        Algorithm::Naive => {
            let k = args.k.ok_or_else(|| {
                CliError::Config("--algorithm naive requires --k".into())
            })?;
            naive_lambda1(&mut access, k, &cfg)?
        }
        Algorithm::A => {
            let k = args
                .k
                .ok_or_else(|| CliError::Config("--algorithm a requires --k".into()))?;
            cwalker_a(&mut access, k, &cfg)?
        }
        Algorithm::B => cwalker_b(&mut access, args.max_k, args.beta, &cfg)?,
        Algorithm::C => cwalker_c(&mut access, args.max_k, args.beta, &cfg)?,
        Algorithm::TopN => {
            let n_eigs = args.n_eigs.unwrap_or(2);
            top_n_sampled(&mut access, args.max_k, n_eigs, args.beta, &cfg)?
        }
    };
    if let Some(trace_path) = &args.trace_out {
        let mut replay_access = FullAccess::unbounded(&graph);
        let trace = replay_trace(&mut replay_access, &cfg)
            .map_err(|e| CliError::Data(e.to_string()))?;
        let mut text = String::with_capacity(trace.len() * 8);
        for v in trace {
            text.push_str(&graph.original_id(v).to_string());
            text.push('\n');
        }
        std::fs::write(trace_path, text).map_err(|e| {
            CliError::Data(format!("cannot write {}: {e}", trace_path.display()))
        })?;
    }
    let out = EstimateOut {
        config: EstimateConfig {
            graph: args.graph.display().to_string(),
            algorithm: args.algorithm,
            k: args.k,
            max_k: args.max_k,
            beta: args.beta,
            n_eigs: args.n_eigs,
            walk_length,
            burn_in,
            budget: args.budget,
            seed: args.seed,
            start_node: args.start_node,
            use_lcc: !args.no_lcc,
            nodes: n,
            edges: graph.edge_count(),
        },
        report,
        version: VERSION,
    };
    write_output(args.output.as_deref(), &to_pretty(&out))
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct BenchOut {
    rows: Vec<harness::MetricRow>,
    config: ExperimentPlan,
    version: &'static str,
}

fn bench(args: BenchArgs, log: LogLevel) -> Result<(), CliError> {
    let plan = ExperimentPlan::from_json_path(&args.plan).map_err(|e| match e {
        harness::HarnessError::Io(io) => CliError::Data(format!("cannot read plan: {io}")),
        other => CliError::Config(other.to_string()),
    })?;
    if log >= LogLevel::Info {
        eprintln!(
            "bench: {} at {} budgets x {} runs on {}",
            plan.algorithm,
            plan.budgets.len(),
            plan.runs,
            plan.graph.display()
        );
    }
    let rows = harness::run_plan(&plan).map_err(|e| match e {
        harness::HarnessError::Plan(m) => CliError::Config(m),
        other => CliError::Data(other.to_string()),
    })?;
    let mut csv = Vec::new();
    harness::write_csv(&rows, &mut csv).map_err(|e| CliError::Data(e.to_string()))?;
    std::fs::write(&args.csv, &csv)
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", args.csv.display())))?;
    let out = BenchOut { rows, config: plan, version: VERSION };
    std::fs::write(&args.json, to_pretty(&out))
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", args.json.display())))?;
    Ok(())
}
