//! Generate the two benchmark topology shapes and print their shape
//! statistics. The generator is layered and deterministic per seed: links
//! only run forward in a random topological order, a backbone keeps every
//! node reachable, and capacities grow during repair until each receiver
//! clears the target rate.

use ncmin::graph::{generate_random_dag, serialize_network, ChurnSchedule};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (name, nodes, links, receivers, rate) in
        [("NSetC1 shape", 30, 90, 20, 5), ("NSetC2 shape", 50, 130, 30, 4)]
    {
        let net = generate_random_dag(nodes, links, receivers, rate, 1)?;
        let merging = net.merging_nodes();
        let worst = net.receivers().iter().map(|&r| net.max_flow(r)).min().unwrap();
        println!("{name}: {nodes} nodes, {links} links, {receivers} receivers, rate {rate}");
        println!("  merging nodes: {}", merging.len());
        println!("  smallest receiver max-flow: {worst}");
        println!("  deepest node: {} hops from the source", net.max_hops_from_source());
        let text = serialize_network(&net, &ChurnSchedule::empty());
        println!("  file form: {} lines, first: {}", text.lines().count(), text.lines().next().unwrap());
    }
    Ok(())
}
