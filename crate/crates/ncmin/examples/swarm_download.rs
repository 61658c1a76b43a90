//! One swarm run in detail: every peer of the butterfly downloads a small
//! file served as random linear combinations, with mixing only at the one
//! merging node. Prints who finished when and what the traffic cost.

use ncmin::graph::butterfly;
use ncmin::sim::{run_simulation, select_coding_nodes, SimConfig, Strategy};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let net = butterfly();
    let (coding_nodes, assignment) = select_coding_nodes(&net, Strategy::Can, 0, None, 0)?;
    println!("coding nodes: {coding_nodes:?}");

    let mut cfg = SimConfig::new(256, 16, 4);
    cfg.seed = 42;
    let report = run_simulation(&net, &assignment, &cfg)?;

    println!(
        "{} blocks in {} segments, {} peers, done after {} rounds",
        report.total_blocks, report.segments, report.peers, report.rounds
    );
    for (peer, round) in &report.completions {
        println!("  {peer} finished in round {round}");
    }
    println!(
        "sent {} packets ({} redundant), redundancy {:.3}, throughput {:.1} bytes/round",
        report.sent_packets,
        report.redundant_packets,
        report.metrics.packet_redundancy,
        report.metrics.system_throughput
    );
    Ok(())
}
