//! The canonical butterfly: two receivers can both download at rate 2 only
//! if the single merging node mixes its inputs. The exhaustive oracle finds
//! that one coding node and one coding link suffice, and the exact rate
//! evaluation shows what plain forwarding loses.

use ncmin::eval::{brute_force_min_coding, symbolic_rates, CodingAssignment};
use ncmin::graph::butterfly;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let net = butterfly();
    println!(
        "butterfly: {} nodes, {} links, receivers {:?}, target rate {}",
        net.node_count(),
        net.links().len(),
        net.receivers(),
        net.target_rate()
    );
    for r in net.receivers() {
        println!("max flow to {r}: {}", net.max_flow(*r));
    }

    let (nodes, links, witness) = brute_force_min_coding(&net, net.target_rate())?;
    println!("\noracle minimum: {nodes} coding node(s), {links} coding link(s)");
    println!("witness masks:\n{}", ncmin::eval::serialize_assignment(&net, &witness));
    println!("rates under the witness: {:?}", symbolic_rates(&net, &witness)?);

    // forwarding only: the merging node relays one input and some receiver
    // stays below target no matter which input it picks
    let mut rng = rand::rng();
    let plain = CodingAssignment::uniform_single_bit(&net, &mut rng);
    println!("rates without coding:    {:?}", symbolic_rates(&net, &plain)?);
    Ok(())
}
