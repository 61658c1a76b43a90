//! Experiment drivers behind the `ncmin` binary: gen, optimize, simulate,
//! compare and oracle. Each driver is an ordinary function over an
//! [`ExperimentConfig`] so tests and examples can call it without spawning
//! a process; the binary only parses flags and maps errors to exit codes
//! (0 ok, 2 invalid input, 3 infeasible result, 4 instance too large).

pub mod chart;
pub mod config;

pub use chart::{ChartKind, ChartSpec, Series};
pub use config::ExperimentConfig;

use crate::eval::{
    brute_force_min_coding, serialize_assignment, CodingAssignment, EvalError,
    FitnessCoefficients,
};
use crate::ga::{history_csv, run_ga, RunResult};
use crate::graph::{
    generate_random_dag, parse_network, serialize_network, ChurnSchedule, GraphError, Network,
};
use crate::sim::{
    compare_strategies, metrics_csv_header, metrics_csv_row, CompareConfig, CompareRow, SimError,
    Strategy,
};
use clap::{Args, Parser, Subcommand};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AppError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("{0}")]
    TooLarge(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl AppError {
    /// Stable exit-code contract for scripts and the test harness.
    pub fn exit_code(&self) -> u8 {
        match self {
            AppError::Invalid(_) | AppError::Io(_) => 2,
            AppError::Infeasible(_) => 3,
            AppError::TooLarge(_) => 4,
        }
    }
}

impl From<GraphError> for AppError {
    fn from(e: GraphError) -> AppError {
        AppError::Invalid(e.to_string())
    }
}

impl From<EvalError> for AppError {
    fn from(e: EvalError) -> AppError {
        match e {
            EvalError::TooLarge { .. } => AppError::TooLarge(e.to_string()),
            EvalError::InfeasibleTarget { .. } => AppError::Infeasible(e.to_string()),
            other => AppError::Invalid(other.to_string()),
        }
    }
}

impl From<SimError> for AppError {
    fn from(e: SimError) -> AppError {
        match e {
            SimError::Eval(inner) => inner.into(),
            other => AppError::Invalid(other.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "ncmin",
    about = "Minimize network coding resources in P2P overlay topologies",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random overlay network file
    Gen(Overrides),
    /// Search a minimal coding assignment with the genetic algorithm
    Optimize(TargetArgs),
    /// Run the swarm simulator under one strategy over the seed grid
    Simulate(Overrides),
    /// Compare placement strategies over paired seeds; CSV plus SVG charts
    Compare(Overrides),
    /// Exhaustively find the minimal coding resources on a small network
    Oracle(TargetArgs),
}

/// Flags mirror config-file keys one to one; a flag overrides the file.
#[derive(Args, Debug, Default)]
struct Overrides {
    /// Experiment config file (key = value lines)
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    links: Option<usize>,
    #[arg(long)]
    receivers: Option<usize>,
    #[arg(long)]
    rate: Option<u32>,
    /// Network file to load instead of generating one
    #[arg(long)]
    network: Option<PathBuf>,
    /// Coding assignment file for GANS runs
    #[arg(long)]
    assignment: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Paired runs per experiment (seeds seed..seed+runs)
    #[arg(long)]
    runs: Option<usize>,
    /// Output directory (env NCMIN_OUT_DIR applies when the flag is absent)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    population: Option<usize>,
    #[arg(long)]
    crossover: Option<f64>,
    #[arg(long)]
    mutation: Option<f64>,
    #[arg(long)]
    generations: Option<u32>,
    #[arg(long)]
    elite: Option<usize>,
    #[arg(long)]
    uniform: Option<f64>,
    #[arg(long)]
    struct_mutation: Option<f64>,
    #[arg(long)]
    min_improvement: Option<f64>,
    #[arg(long)]
    stall: Option<u32>,
    #[arg(long)]
    improve: Option<bool>,
    #[arg(long)]
    q: Option<u8>,
    #[arg(long)]
    trials: Option<usize>,
    /// Six comma-separated fitness weights a1..a6
    #[arg(long)]
    weights: Option<String>,
    #[arg(long)]
    content_bytes: Option<usize>,
    #[arg(long)]
    block_bytes: Option<usize>,
    #[arg(long)]
    segment_blocks: Option<usize>,
    #[arg(long)]
    deadline: Option<u32>,
    /// Strategy for `simulate`: GANS, RSN, CAN or NONE
    #[arg(long)]
    strategy: Option<String>,
    /// Comma-separated strategy list for `compare`
    #[arg(long)]
    strategies: Option<String>,
    #[arg(long)]
    rsn_count: Option<usize>,
    /// Comma-separated file sizes in blocks swept by `compare`
    #[arg(long)]
    file_blocks: Option<String>,
    /// Comma-separated dynamic-link counts; `compare` sweeps the list
    #[arg(long)]
    dynamic_links: Option<String>,
    #[arg(long)]
    churn_max_round: Option<u32>,
}

#[derive(Args, Debug)]
struct TargetArgs {
    #[command(flatten)]
    common: Overrides,
    /// Required rate; defaults to the network's own target
    #[arg(long)]
    target: Option<u32>,
}

impl Overrides {
    fn build(&self) -> Result<ExperimentConfig, AppError> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::parse(&fs::read_to_string(p)?)?,
            None => ExperimentConfig::default(),
        };
        if self.out.is_none() {
            if let Ok(dir) = std::env::var("NCMIN_OUT_DIR") {
                cfg.out = PathBuf::from(dir);
            }
        }
        let mut set = |key: &str, value: Option<String>| -> Result<(), AppError> {
            if let Some(v) = value {
                cfg.set(key, &v).map_err(AppError::Invalid)?;
            }
            Ok(())
        };
        set("nodes", self.nodes.map(|v| v.to_string()))?;
        set("links", self.links.map(|v| v.to_string()))?;
        set("receivers", self.receivers.map(|v| v.to_string()))?;
        set("rate", self.rate.map(|v| v.to_string()))?;
        set("network", self.network.as_ref().map(|v| v.display().to_string()))?;
        set("assignment", self.assignment.as_ref().map(|v| v.display().to_string()))?;
        set("seed", self.seed.map(|v| v.to_string()))?;
        set("runs", self.runs.map(|v| v.to_string()))?;
        set("out", self.out.as_ref().map(|v| v.display().to_string()))?;
        set("population", self.population.map(|v| v.to_string()))?;
        set("crossover", self.crossover.map(|v| v.to_string()))?;
        set("mutation", self.mutation.map(|v| v.to_string()))?;
        set("generations", self.generations.map(|v| v.to_string()))?;
        set("elite", self.elite.map(|v| v.to_string()))?;
        set("uniform", self.uniform.map(|v| v.to_string()))?;
        set("struct-mutation", self.struct_mutation.map(|v| v.to_string()))?;
        set("min-improvement", self.min_improvement.map(|v| v.to_string()))?;
        set("stall", self.stall.map(|v| v.to_string()))?;
        set("improve", self.improve.map(|v| v.to_string()))?;
        set("q", self.q.map(|v| v.to_string()))?;
        set("trials", self.trials.map(|v| v.to_string()))?;
        set("weights", self.weights.clone())?;
        set("content-bytes", self.content_bytes.map(|v| v.to_string()))?;
        set("block-bytes", self.block_bytes.map(|v| v.to_string()))?;
        set("segment-blocks", self.segment_blocks.map(|v| v.to_string()))?;
        set("deadline", self.deadline.map(|v| v.to_string()))?;
        set("strategy", self.strategy.clone())?;
        set("strategies", self.strategies.clone())?;
        set("rsn-count", self.rsn_count.map(|v| v.to_string()))?;
        set("file-blocks", self.file_blocks.clone())?;
        set("dynamic-links", self.dynamic_links.clone())?;
        set("churn-max-round", self.churn_max_round.map(|v| v.to_string()))?;
        Ok(cfg)
    }
}

/// Binary entry point: parse flags, dispatch, map errors to exit codes.
pub fn run() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(ov) => ov.build().and_then(|cfg| cmd_gen(&cfg).map(drop)),
        Command::Optimize(args) => {
            args.common.build().and_then(|cfg| cmd_optimize(&cfg, args.target).map(drop))
        }
        Command::Simulate(ov) => ov.build().and_then(|cfg| cmd_simulate(&cfg).map(drop)),
        Command::Compare(ov) => ov.build().and_then(|cfg| cmd_compare(&cfg).map(drop)),
        Command::Oracle(args) => {
            args.common.build().and_then(|cfg| cmd_oracle(&cfg, args.target).map(drop))
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn load_network(cfg: &ExperimentConfig) -> Result<Network, AppError> {
    match &cfg.network {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            Ok(parse_network(&text)?.0)
        }
        None => Ok(generate_random_dag(cfg.nodes, cfg.links, cfg.receivers, cfg.rate, cfg.seed)?),
    }
}

// the optimized assignment for GANS runs: from the file when given, from a
// fresh search when needed
fn gans_assignment(
    cfg: &ExperimentConfig,
    net: &Network,
    needed: bool,
) -> Result<Option<CodingAssignment>, AppError> {
    if let Some(path) = &cfg.assignment {
        let text = fs::read_to_string(path)?;
        return Ok(Some(crate::eval::parse_assignment(net, &text)?));
    }
    if !needed {
        return Ok(None);
    }
    println!("no assignment file given; running the genetic search first");
    let coeffs = FitnessCoefficients::new(cfg.weights, net.target_rate())?;
    let result = run_ga(net, &cfg.ga_params(), &coeffs, cfg.seed)?;
    Ok(Some(result.best_assignment))
}

fn write(path: &Path, content: &str) -> Result<(), AppError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, content)?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Generates a network per the config counts and writes `network.txt`.
pub fn cmd_gen(cfg: &ExperimentConfig) -> Result<PathBuf, AppError> {
    let net = generate_random_dag(cfg.nodes, cfg.links, cfg.receivers, cfg.rate, cfg.seed)?;
    let path = cfg.out.join("network.txt");
    write(&path, &serialize_network(&net, &ChurnSchedule::empty()))?;
    println!(
        "{} nodes, {} links, {} receivers, target rate {}, {} merging nodes",
        net.node_count(),
        net.links().len(),
        net.receivers().len(),
        net.target_rate(),
        net.merging_nodes().len()
    );
    Ok(path)
}

/// Runs the genetic search and writes `assignment.txt` plus
/// `ga_history.csv`. Fails as infeasible (exit 3) when the best assignment
/// misses the target rate (the network's own, unless overridden); the
/// files are written first.
pub fn cmd_optimize(cfg: &ExperimentConfig, target: Option<u32>) -> Result<RunResult, AppError> {
    let net = load_network(cfg)?;
    let target = target.unwrap_or_else(|| net.target_rate());
    let coeffs = FitnessCoefficients::new(cfg.weights, target)?;
    let result = run_ga(&net, &cfg.ga_params(), &coeffs, cfg.seed)?;
    write(&cfg.out.join("assignment.txt"), &serialize_assignment(&net, &result.best_assignment))?;
    write(&cfg.out.join("ga_history.csv"), &history_csv(&result.history))?;
    println!(
        "best: {} coding nodes, {} coding links, min rate {}, avg rate {:.2}, \
         objective {:.3} ({} generations, {} evaluations)",
        result.report.coding_nodes,
        result.report.coding_links,
        result.report.min_rate,
        result.report.avg_rate,
        result.report.objective,
        result.generations,
        result.evaluations
    );
    if result.report.min_rate < target {
        return Err(AppError::Infeasible(format!(
            "best assignment reaches min rate {} below target {target}",
            result.report.min_rate
        )));
    }
    Ok(result)
}

fn compare_config(cfg: &ExperimentConfig, content_bytes: usize, dynamic: usize) -> CompareConfig {
    CompareConfig {
        strategies: cfg.strategies.clone(),
        seeds: cfg.seed_list(),
        rsn_count: cfg.rsn_count,
        content_bytes,
        block_bytes: cfg.block_bytes,
        blocks_per_segment: cfg.segment_blocks,
        q: cfg.q,
        deadline_rounds: cfg.deadline,
        dynamic_links: dynamic,
        churn_max_round: cfg.churn_max_round,
    }
}

/// Runs the configured strategy over the seed grid and writes
/// `metrics.csv` (one row per seed).
pub fn cmd_simulate(cfg: &ExperimentConfig) -> Result<Vec<CompareRow>, AppError> {
    let net = load_network(cfg)?;
    let ga = gans_assignment(cfg, &net, cfg.strategy == Strategy::Gans)?;
    let mut ccfg = compare_config(
        cfg,
        cfg.content_bytes,
        cfg.dynamic_links.first().copied().unwrap_or(0),
    );
    ccfg.strategies = vec![cfg.strategy];
    let outcome = compare_strategies(&net, ga.as_ref(), &ccfg)?;
    let mut csv = String::from(metrics_csv_header());
    csv.push('\n');
    for row in &outcome.rows {
        csv.push_str(&metrics_csv_row(&row.strategy.to_string(), row.seed, &row.metrics));
        csv.push('\n');
    }
    write(&cfg.out.join("metrics.csv"), &csv)?;
    for s in &outcome.summaries {
        println!(
            "{}: redundancy {:.3}, failure {:.3}, completed {}/{} runs",
            s.strategy, s.redundancy_mean, s.failure_mean, s.completed_runs, s.runs
        );
    }
    Ok(outcome.rows)
}

/// All rows a comparison produced, tagged with the file size they ran at.
pub struct ComparisonTable {
    pub rows: Vec<(usize, CompareRow)>,
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    if v.is_empty() {
        f64::NAN
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

/// Paired-seed strategy comparison over the file-size grid: writes
/// `compare.csv` (one row per strategy, seed and file size) and the four
/// figure SVGs. The failure chart sweeps the dynamic-links list at the
/// largest file size; the other charts run at the first entry.
pub fn cmd_compare(cfg: &ExperimentConfig) -> Result<ComparisonTable, AppError> {
    if cfg.file_blocks.is_empty() {
        return Err(AppError::Invalid("file-blocks must name at least one size".into()));
    }
    let net = load_network(cfg)?;
    let needs_gans = cfg.strategies.contains(&Strategy::Gans);
    let ga = gans_assignment(cfg, &net, needs_gans)?;
    let dl_base = cfg.dynamic_links.first().copied().unwrap_or(0);

    let mut rows: Vec<(usize, CompareRow)> = Vec::new();
    let mut largest: Vec<CompareRow> = Vec::new();
    for &blocks in &cfg.file_blocks {
        let ccfg = compare_config(cfg, blocks * cfg.block_bytes, dl_base);
        let outcome = compare_strategies(&net, ga.as_ref(), &ccfg)?;
        if blocks == *cfg.file_blocks.iter().max().expect("nonempty") {
            largest = outcome.rows.clone();
        }
        rows.extend(outcome.rows.into_iter().map(|r| (blocks, r)));
    }

    let mut csv = format!("{},file_blocks\n", metrics_csv_header());
    for (blocks, row) in &rows {
        csv.push_str(&metrics_csv_row(&row.strategy.to_string(), row.seed, &row.metrics));
        csv.push_str(&format!(",{blocks}\n"));
    }
    write(&cfg.out.join("compare.csv"), &csv)?;

    // per-strategy means over seeds at one file size
    let strat_mean = |rows: &[(usize, CompareRow)],
                      s: Strategy,
                      blocks: usize,
                      f: &dyn Fn(&CompareRow) -> Option<f64>| {
        mean(
            rows.iter()
                .filter(|(b, r)| *b == blocks && r.strategy == s)
                .filter_map(|(_, r)| f(r)),
        )
    };
    let sizes: Vec<f64> = cfg.file_blocks.iter().map(|&b| b as f64).collect();
    let series_over_sizes = |f: &dyn Fn(&CompareRow) -> Option<f64>| -> Vec<Series> {
        cfg.strategies
            .iter()
            .map(|&s| Series {
                name: s.to_string(),
                points: cfg
                    .file_blocks
                    .iter()
                    .map(|&b| (b as f64, strat_mean(&rows, s, b, f)))
                    .collect(),
            })
            .collect()
    };
    let mut charts = vec![
        ChartSpec {
            kind: ChartKind::DownloadTimeVsFileSize,
            series: series_over_sizes(&|r| r.metrics.avg_distribution_time),
        },
        ChartSpec {
            kind: ChartKind::RedundancyVsFileSize,
            series: series_over_sizes(&|r| Some(r.metrics.packet_redundancy)),
        },
    ];
    debug_assert_eq!(sizes.len(), charts[0].series[0].points.len());

    // failure rate across the dynamic-links sweep, at the largest file size
    let top_blocks = *cfg.file_blocks.iter().max().expect("nonempty");
    let mut failure_series: Vec<Series> = cfg
        .strategies
        .iter()
        .map(|&s| Series { name: s.to_string(), points: Vec::new() })
        .collect();
    for &dl in &cfg.dynamic_links {
        let sweep_rows: Vec<(usize, CompareRow)> = if dl == dl_base {
            rows.iter().filter(|(b, _)| *b == top_blocks).cloned().collect()
        } else {
            let ccfg = compare_config(cfg, top_blocks * cfg.block_bytes, dl);
            compare_strategies(&net, ga.as_ref(), &ccfg)?
                .rows
                .into_iter()
                .map(|r| (top_blocks, r))
                .collect()
        };
        for (i, &s) in cfg.strategies.iter().enumerate() {
            let m = strat_mean(&sweep_rows, s, top_blocks, &|r| Some(r.metrics.failure_rate));
            failure_series[i].points.push((dl as f64, m));
        }
    }
    charts.push(ChartSpec { kind: ChartKind::FailureVsDynamicLinks, series: failure_series });

    // cumulative throughput over rounds at the largest file size: bytes of
    // fully finished peers by round r, divided by r, averaged over seeds
    let content = (top_blocks * cfg.block_bytes) as f64;
    let horizon = largest.iter().map(|r| r.rounds).max().unwrap_or(1).max(1);
    let step = (horizon as usize).div_ceil(60).max(1);
    let grid: Vec<u32> = (1..=horizon).step_by(step).collect();
    let throughput_series: Vec<Series> = cfg
        .strategies
        .iter()
        .map(|&s| Series {
            name: s.to_string(),
            points: grid
                .iter()
                .map(|&r| {
                    let y = mean(largest.iter().filter(|row| row.strategy == s).map(|row| {
                        let done = row.completions.values().filter(|&&c| c <= r).count();
                        done as f64 * content / f64::from(r)
                    }));
                    (f64::from(r), y)
                })
                .collect(),
        })
        .collect();
    charts.push(ChartSpec { kind: ChartKind::ThroughputVsTime, series: throughput_series });

    for spec in &charts {
        match spec.render() {
            Ok(svg) => write(&cfg.out.join(spec.kind.file_name()), &svg)?,
            Err(reason) => eprintln!("skipping {}: {reason}", spec.kind.file_name()),
        }
    }

    for &s in &cfg.strategies {
        let avg = mean(
            rows.iter()
                .filter(|(_, r)| r.strategy == s)
                .filter_map(|(_, r)| r.metrics.avg_distribution_time),
        );
        let red =
            mean(rows.iter().filter(|(_, r)| r.strategy == s).map(|(_, r)| r.metrics.packet_redundancy));
        let fail =
            mean(rows.iter().filter(|(_, r)| r.strategy == s).map(|(_, r)| r.metrics.failure_rate));
        println!("{s}: mean download {avg:.2} rounds, redundancy {red:.3}, failure {fail:.3}");
    }
    Ok(ComparisonTable { rows })
}

/// Exhaustive minimum over all assignments; prints `N_n N_l` and the
/// witness masks. Exit 4 when the instance exceeds the enumeration bound,
/// exit 3 when even full coding misses the target.
pub fn cmd_oracle(
    cfg: &ExperimentConfig,
    target: Option<u32>,
) -> Result<(usize, usize, CodingAssignment), AppError> {
    let net = load_network(cfg)?;
    let target = target.unwrap_or_else(|| net.target_rate());
    let (nodes, links, witness) = brute_force_min_coding(&net, target)?;
    println!("{nodes} {links}");
    print!("{}", serialize_assignment(&net, &witness));
    Ok((nodes, links, witness))
}
