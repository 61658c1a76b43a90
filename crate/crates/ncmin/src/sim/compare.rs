//! Head-to-head strategy runs over shared seeds and shared churn, plus the
//! per-strategy summaries the comparison CSV and charts are built from.

use super::metrics::{metrics_csv_row, SimMetrics};
use super::strategy::{select_coding_nodes, Strategy};
use super::{run_simulation, SimConfig, SimError};
use crate::eval::CodingAssignment;
use crate::graph::{ChurnSchedule, Network, NodeId};
use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub struct CompareConfig {
    pub strategies: Vec<Strategy>,
    pub seeds: Vec<u64>,
    /// Mixing-node count used when an RSN run is requested.
    pub rsn_count: usize,
    pub content_bytes: usize,
    pub block_bytes: usize,
    pub blocks_per_segment: usize,
    pub q: u8,
    pub deadline_rounds: u32,
    /// Links forced down per run; the same failures hit every strategy of a
    /// seed so the comparison stays paired.
    pub dynamic_links: usize,
    /// Latest round a scheduled failure may land in.
    pub churn_max_round: u32,
}

impl CompareConfig {
    pub fn new(content_bytes: usize, block_bytes: usize, blocks_per_segment: usize) -> CompareConfig {
        CompareConfig {
            strategies: Strategy::ALL.to_vec(),
            seeds: (0..10).collect(),
            rsn_count: 1,
            content_bytes,
            block_bytes,
            blocks_per_segment,
            q: 8,
            deadline_rounds: 10_000,
            dynamic_links: 0,
            churn_max_round: 1,
        }
    }

    pub fn total_blocks(&self) -> usize {
        self.content_bytes.div_ceil(self.block_bytes)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub strategy: Strategy,
    pub seed: u64,
    pub metrics: SimMetrics,
    /// Round each peer finished in; incomplete peers are absent.
    pub completions: BTreeMap<NodeId, u32>,
    pub rounds: u32,
}

/// Mean and sample standard deviation of each metric across one strategy's
/// runs. Times average only over runs where every peer finished.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategySummary {
    pub strategy: Strategy,
    pub runs: usize,
    /// Runs in which every peer completed before the deadline.
    pub completed_runs: usize,
    pub redundancy_mean: f64,
    pub redundancy_std: f64,
    pub avg_time_mean: Option<f64>,
    pub avg_time_std: Option<f64>,
    pub max_time_mean: Option<f64>,
    pub throughput_mean: f64,
    pub failure_mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareOutcome {
    pub rows: Vec<CompareRow>,
    pub summaries: Vec<StrategySummary>,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
    (mean, var.sqrt())
}

fn summarize(strategy: Strategy, rows: &[&CompareRow]) -> StrategySummary {
    let redundancy: Vec<f64> = rows.iter().map(|r| r.metrics.packet_redundancy).collect();
    let avg_times: Vec<f64> = rows.iter().filter_map(|r| r.metrics.avg_distribution_time).collect();
    let max_times: Vec<f64> =
        rows.iter().filter_map(|r| r.metrics.max_download_time.map(f64::from)).collect();
    let throughput: Vec<f64> = rows.iter().map(|r| r.metrics.system_throughput).collect();
    let failure: Vec<f64> = rows.iter().map(|r| r.metrics.failure_rate).collect();
    let (redundancy_mean, redundancy_std) = mean_std(&redundancy);
    let (avg_mean, avg_std) = mean_std(&avg_times);
    let (max_mean, _) = mean_std(&max_times);
    StrategySummary {
        strategy,
        runs: rows.len(),
        completed_runs: rows.iter().filter(|r| r.metrics.failure_rate == 0.0).count(),
        redundancy_mean,
        redundancy_std,
        avg_time_mean: (!avg_times.is_empty()).then_some(avg_mean),
        avg_time_std: (!avg_times.is_empty()).then_some(avg_std),
        max_time_mean: (!max_times.is_empty()).then_some(max_mean),
        throughput_mean: mean_std(&throughput).0,
        failure_mean: mean_std(&failure).0,
    }
}

/// Runs every configured strategy over every seed. Per seed, all strategies
/// share one churn schedule and one content/emission seed, so rows with the
/// same seed are directly comparable.
pub fn compare_strategies(
    net: &Network,
    optimized: Option<&CodingAssignment>,
    cfg: &CompareConfig,
) -> Result<CompareOutcome, SimError> {
    let mut rows = Vec::new();
    for &seed in &cfg.seeds {
        let churn = if cfg.dynamic_links > 0 {
            ChurnSchedule::random_downs(net, cfg.dynamic_links, cfg.churn_max_round, seed)
        } else {
            ChurnSchedule::empty()
        };
        for &strategy in &cfg.strategies {
            let (_, assignment) =
                select_coding_nodes(net, strategy, cfg.rsn_count, optimized, seed)?;
            let mut sim = SimConfig::new(cfg.content_bytes, cfg.block_bytes, cfg.blocks_per_segment);
            sim.q = cfg.q;
            sim.deadline_rounds = cfg.deadline_rounds;
            sim.seed = seed;
            sim.churn = churn.clone();
            let report = run_simulation(net, &assignment, &sim)?;
            rows.push(CompareRow {
                strategy,
                seed,
                metrics: report.metrics,
                completions: report.completions,
                rounds: report.rounds,
            });
        }
    }
    let mut by_strategy: BTreeMap<Strategy, Vec<&CompareRow>> = BTreeMap::new();
    for row in &rows {
        by_strategy.entry(row.strategy).or_default().push(row);
    }
    let summaries = cfg
        .strategies
        .iter()
        .filter_map(|s| by_strategy.get(s).map(|rows| summarize(*s, rows)))
        .collect();
    Ok(CompareOutcome { rows, summaries })
}

pub fn compare_csv_header() -> String {
    format!("{},file_blocks", super::metrics::metrics_csv_header())
}

pub fn compare_csv(outcome: &CompareOutcome, file_blocks: usize) -> String {
    let mut out = String::new();
    out.push_str(&compare_csv_header());
    out.push('\n');
    for row in &outcome.rows {
        out.push_str(&metrics_csv_row(&row.strategy.to_string(), row.seed, &row.metrics));
        out.push_str(&format!(",{file_blocks}\n"));
    }
    out
}
