//! The five swarm metrics and their CSV rendering.

use crate::graph::NodeId;
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Outcome metrics of one run. `avg_distribution_time` and
/// `max_download_time` are `None` when no peer completed; their CSV cells
/// then read `nan`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimMetrics {
    /// Packets sent divided by the ideal minimum (peers x blocks, each
    /// content unit delivered once per peer).
    pub packet_redundancy: f64,
    /// Mean completion round over peers that completed.
    pub avg_distribution_time: Option<f64>,
    /// Completion round of the slowest completed peer.
    pub max_download_time: Option<u32>,
    /// Decoded bytes across all peers per elapsed round.
    pub system_throughput: f64,
    /// Peers that missed the deadline, as a fraction of all peers.
    pub failure_rate: f64,
}

pub(crate) fn compute_metrics(
    sent: u64,
    peers: usize,
    total_blocks: usize,
    completions: &BTreeMap<NodeId, u32>,
    decoded_bytes: u64,
    elapsed_rounds: u32,
) -> SimMetrics {
    let ideal = (peers * total_blocks) as f64;
    let packet_redundancy = if ideal > 0.0 { sent as f64 / ideal } else { 0.0 };
    let avg_distribution_time = if completions.is_empty() {
        None
    } else {
        Some(completions.values().map(|&r| f64::from(r)).sum::<f64>() / completions.len() as f64)
    };
    let max_download_time = completions.values().max().copied();
    let system_throughput = if elapsed_rounds == 0 {
        0.0
    } else {
        decoded_bytes as f64 / f64::from(elapsed_rounds)
    };
    let failure_rate = if peers == 0 {
        0.0
    } else {
        (peers - completions.len()) as f64 / peers as f64
    };
    SimMetrics {
        packet_redundancy,
        avg_distribution_time,
        max_download_time,
        system_throughput,
        failure_rate,
    }
}

pub fn metrics_csv_header() -> &'static str {
    "strategy,seed,redundancy,avg_time,max_time,throughput,failure_rate"
}

pub fn metrics_csv_row(strategy: &str, seed: u64, m: &SimMetrics) -> String {
    let mut out = String::new();
    let _ = write!(out, "{strategy},{seed},{},", m.packet_redundancy);
    match m.avg_distribution_time {
        Some(v) => {
            let _ = write!(out, "{v},");
        }
        None => out.push_str("nan,"),
    }
    match m.max_download_time {
        Some(v) => {
            let _ = write!(out, "{v},");
        }
        None => out.push_str("nan,"),
    }
    let _ = write!(out, "{},{}", m.system_throughput, m.failure_rate);
    out
}
