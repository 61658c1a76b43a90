//! Random layered DAG generation. Nodes get random topological positions,
//! links only run forward, a backbone keeps everything reachable, and a
//! min-cut repair pass raises link capacities until every receiver clears
//! the target rate. Retries with fresh placements when a draw cannot be
//! repaired.

use super::{build_network, GraphError, LinkId, Network, NodeId};
use crate::rng::substream;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use std::collections::BTreeSet;
use std::collections::VecDeque;

const ATTEMPTS: u32 = 100;
const GEN_TAG: u64 = 0x6765_6e64_6167; // distinguishes generator streams

/// Generates a connected DAG with exactly the requested counts where every
/// receiver's max-flow is at least `target_rate`. Node 0 is the source.
/// Deterministic per seed. Fails with `InfeasibleParameters` when the counts
/// cannot fit or no repairable topology is found within the retry budget.
pub fn generate_random_dag(
    n_nodes: usize,
    n_links: usize,
    n_receivers: usize,
    target_rate: u32,
    seed: u64,
) -> Result<Network, GraphError> {
    if n_nodes < 2
        || n_receivers == 0
        || n_receivers > n_nodes - 1
        || n_links < n_nodes - 1
        || n_links > n_nodes * (n_nodes - 1) / 2
        || target_rate == 0
    {
        return Err(GraphError::InfeasibleParameters);
    }
    for attempt in 0..ATTEMPTS {
        let mut rng = substream(seed, &[GEN_TAG, u64::from(attempt)]);
        if let Some(net) = try_generate(n_nodes, n_links, n_receivers, target_rate, &mut rng) {
            return Ok(net);
        }
    }
    Err(GraphError::InfeasibleParameters)
}

fn try_generate(
    n_nodes: usize,
    n_links: usize,
    n_receivers: usize,
    target_rate: u32,
    rng: &mut impl Rng,
) -> Option<Network> {
    // random topological placement, source fixed at the front
    let mut order: Vec<usize> = (1..n_nodes).collect();
    order.shuffle(rng);
    order.insert(0, 0);

    // backbone: each node takes one link from some earlier node, which keeps
    // the whole graph reachable from the source
    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    for p in 1..n_nodes {
        let from = order[rng.random_range(0..p)];
        pairs.insert((from, order[p]));
    }
    // positions for forward-only sampling of the remaining links
    let mut pos = vec![0usize; n_nodes];
    for (p, &n) in order.iter().enumerate() {
        pos[n] = p;
    }
    let mut tries = 0;
    while pairs.len() < n_links {
        tries += 1;
        if tries > 60 * n_links {
            return None;
        }
        let a = rng.random_range(0..n_nodes);
        let b = rng.random_range(0..n_nodes);
        if a == b {
            continue;
        }
        let (tail, head) = if pos[a] < pos[b] { (a, b) } else { (b, a) };
        pairs.insert((tail, head));
    }

    let mut receivers: Vec<usize> = (1..n_nodes).collect();
    receivers.shuffle(rng);
    receivers.truncate(n_receivers);
    receivers.sort_unstable();

    let mut links: Vec<(NodeId, NodeId, u32)> =
        pairs.iter().map(|&(t, h)| (NodeId(t), NodeId(h), 1)).collect();

    // capacity repair: while a receiver's flow is short, raise the capacity
    // of one random link crossing the current min cut
    let receiver_ids: Vec<NodeId> = receivers.iter().map(|&r| NodeId(r)).collect();
    for &r in &receiver_ids {
        let mut budget = 30 * target_rate.max(1);
        loop {
            let probe = build_unchecked(n_nodes, &links, &receiver_ids)?;
            let flow = probe.max_flow(r);
            if flow >= target_rate {
                break;
            }
            if budget == 0 {
                return None;
            }
            budget -= 1;
            let crossing = min_cut_links(&probe, r);
            let &bump = crossing.choose(rng)?;
            links[bump.0].2 += 1;
        }
    }

    build_network(n_nodes, NodeId(0), &receiver_ids, &links, target_rate).ok()
}

/// Builds with rate 1 (reachability only) so repair can probe intermediate
/// capacity states that are still short of the real target.
fn build_unchecked(
    n_nodes: usize,
    links: &[(NodeId, NodeId, u32)],
    receivers: &[NodeId],
) -> Option<Network> {
    build_network(n_nodes, NodeId(0), receivers, links, 1).ok()
}

/// Links crossing the min cut between the source side and the rest, found
/// from the residual reachability of a finished max-flow run. Recomputing
/// the flow here keeps the helper self-contained; these graphs are tiny.
fn min_cut_links(net: &Network, to: NodeId) -> Vec<LinkId> {
    // saturate: recompute residual forward capacities with a fresh flow
    let m = net.links().len();
    let mut fwd: Vec<u32> = net.links().iter().map(|l| l.capacity).collect();
    let mut rev = vec![0u32; m];
    loop {
        let mut parent: Vec<Option<(usize, bool)>> = vec![None; net.node_count()];
        let mut seen = vec![false; net.node_count()];
        seen[net.source().0] = true;
        let mut queue = VecDeque::from([net.source()]);
        while let Some(v) = queue.pop_front() {
            for &lid in net.out_links(v) {
                let l = net.link(lid);
                if fwd[lid.0] > 0 && !seen[l.head.0] {
                    seen[l.head.0] = true;
                    parent[l.head.0] = Some((lid.0, true));
                    queue.push_back(l.head);
                }
            }
            for &lid in net.in_links(v) {
                let l = net.link(lid);
                if rev[lid.0] > 0 && !seen[l.tail.0] {
                    seen[l.tail.0] = true;
                    parent[l.tail.0] = Some((lid.0, false));
                    queue.push_back(l.tail);
                }
            }
        }
        if !seen[to.0] {
            // min cut: alive links from the reachable side out
            return net
                .links()
                .iter()
                .filter(|l| seen[l.tail.0] && !seen[l.head.0])
                .map(|l| l.id)
                .collect();
        }
        let mut bottleneck = u32::MAX;
        let mut v = to;
        while v != net.source() {
            let (lid, forward) = parent[v.0].expect("reached from source");
            bottleneck = bottleneck.min(if forward { fwd[lid] } else { rev[lid] });
            v = if forward { net.link(LinkId(lid)).tail } else { net.link(LinkId(lid)).head };
        }
        let mut v = to;
        while v != net.source() {
            let (lid, forward) = parent[v.0].expect("reached from source");
            if forward {
                fwd[lid] -= bottleneck;
                rev[lid] += bottleneck;
            } else {
                rev[lid] -= bottleneck;
                fwd[lid] += bottleneck;
            }
            v = if forward { net.link(LinkId(lid)).tail } else { net.link(LinkId(lid)).head };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::serialize_network;
    use crate::graph::ChurnSchedule;

    #[test]
    fn requested_counts_and_rates_hold() {
        let net = generate_random_dag(30, 90, 20, 5, 1).expect("generation succeeds");
        assert_eq!(net.node_count(), 30);
        assert_eq!(net.links().len(), 90);
        assert_eq!(net.receivers().len(), 20);
        assert_eq!(net.source(), NodeId(0));
        for &r in net.receivers() {
            assert!(net.max_flow(r) >= 5, "receiver {r} below rate");
        }
    }

    #[test]
    fn all_nodes_reachable_and_source_has_no_inputs() {
        for seed in 0..10u64 {
            let net = generate_random_dag(12, 20, 4, 2, seed).unwrap();
            assert!(net.in_links(net.source()).is_empty());
            let mut seen = vec![false; net.node_count()];
            seen[0] = true;
            let mut stack = vec![net.source()];
            while let Some(v) = stack.pop() {
                for &lid in net.out_links(v) {
                    let h = net.link(lid).head;
                    if !seen[h.0] {
                        seen[h.0] = true;
                        stack.push(h);
                    }
                }
            }
            assert!(seen.iter().all(|&s| s), "seed {seed}: every node reachable");
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = generate_random_dag(15, 30, 5, 3, 42).unwrap();
        let b = generate_random_dag(15, 30, 5, 3, 42).unwrap();
        let c = generate_random_dag(15, 30, 5, 3, 43).unwrap();
        let empty = ChurnSchedule::empty();
        assert_eq!(serialize_network(&a, &empty), serialize_network(&b, &empty));
        assert_ne!(serialize_network(&a, &empty), serialize_network(&c, &empty));
    }

    #[test]
    fn impossible_parameters_fail_fast() {
        assert_eq!(generate_random_dag(5, 3, 2, 1, 0), Err(GraphError::InfeasibleParameters));
        assert_eq!(generate_random_dag(4, 7, 2, 1, 0), Err(GraphError::InfeasibleParameters));
        assert_eq!(generate_random_dag(5, 8, 0, 1, 0), Err(GraphError::InfeasibleParameters));
        assert_eq!(generate_random_dag(5, 8, 5, 1, 0), Err(GraphError::InfeasibleParameters));
    }

    #[test]
    fn larger_profile_generates() {
        let net = generate_random_dag(50, 130, 30, 4, 7).expect("generation succeeds");
        assert_eq!(net.links().len(), 130);
        for &r in net.receivers() {
            assert!(net.max_flow(r) >= 4);
        }
    }
}
