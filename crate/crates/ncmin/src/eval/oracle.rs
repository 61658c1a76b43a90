//! Exact evaluation and exhaustive search, independent of the randomized
//! path. The achievable rate of an assignment for one receiver equals the
//! max-flow of a derived graph whose adjacency admits exactly the permitted
//! (input, output) contributions, truncated by the basis dimension at the
//! source. No coefficients are involved, so this is the oracle the
//! randomized evaluator and the genetic search are validated against.

use super::{CodingAssignment, EvalError};
use crate::graph::{Network, NodeId};
use std::collections::BTreeMap;
use std::collections::VecDeque;

/// Assignments with more genome bits than this are refused by
/// [`brute_force_min_coding`]; 2^24 exhaustive feasibility checks is the
/// desk-scale ceiling.
pub const ENUMERATION_LIMIT_BITS: usize = 24;

/// Plain edge-list max-flow (shortest augmenting paths), used on the small
/// derived graphs built per receiver.
struct FlowGraph {
    // edges come in (forward, reverse) pairs: edge i ^ 1 is the reverse
    to: Vec<usize>,
    cap: Vec<u32>,
    adj: Vec<Vec<usize>>,
}

impl FlowGraph {
    fn new(vertices: usize) -> FlowGraph {
        FlowGraph { to: Vec::new(), cap: Vec::new(), adj: vec![Vec::new(); vertices] }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: u32) {
        let id = self.to.len();
        self.to.push(to);
        self.cap.push(cap);
        self.adj[from].push(id);
        self.to.push(from);
        self.cap.push(0);
        self.adj[to].push(id + 1);
    }

    fn max_flow(&mut self, s: usize, t: usize) -> u32 {
        let mut total = 0;
        loop {
            let mut pred: Vec<Option<usize>> = vec![None; self.adj.len()];
            let mut queue = VecDeque::from([s]);
            let mut found = false;
            'bfs: while let Some(v) = queue.pop_front() {
                for &e in &self.adj[v] {
                    let w = self.to[e];
                    if self.cap[e] > 0 && pred[w].is_none() && w != s {
                        pred[w] = Some(e);
                        if w == t {
                            found = true;
                            break 'bfs;
                        }
                        queue.push_back(w);
                    }
                }
            }
            if !found {
                return total;
            }
            let mut bottleneck = u32::MAX;
            let mut v = t;
            while v != s {
                let e = pred[v].expect("path exists");
                bottleneck = bottleneck.min(self.cap[e]);
                v = self.to[e ^ 1];
            }
            let mut v = t;
            while v != s {
                let e = pred[v].expect("path exists");
                self.cap[e] -= bottleneck;
                self.cap[e ^ 1] += bottleneck;
                v = self.to[e ^ 1];
            }
            total += bottleneck;
        }
    }
}

const WIDE: u32 = 1 << 20; // effectively unbounded internal adjacency

fn restricted_flow(net: &Network, a: &CodingAssignment, receiver: NodeId) -> u32 {
    let m = net.links().len();
    // vertices: 0 super-source, 1 source pool, then in/out per link, sink last
    let l_in = |l: usize| 2 + 2 * l;
    let l_out = |l: usize| 3 + 2 * l;
    let sink = 2 + 2 * m;
    let mut g = FlowGraph::new(sink + 1);
    g.add_edge(0, 1, net.target_rate());
    for l in net.links().iter().filter(|l| l.alive) {
        g.add_edge(l_in(l.id.0), l_out(l.id.0), l.capacity);
        if l.tail == net.source() {
            g.add_edge(1, l_in(l.id.0), WIDE);
        }
        if l.head == receiver {
            g.add_edge(l_out(l.id.0), sink, WIDE);
        }
    }
    for v in net.nodes().filter(|&v| v != net.source()) {
        let ins = net.in_links(v);
        for &q in net.out_links(v) {
            if !net.link(q).alive {
                continue;
            }
            for (i, &r) in ins.iter().enumerate() {
                if !net.link(r).alive {
                    continue;
                }
                let permitted = match a.mask(v, q) {
                    Some(mask) => mask[i],
                    None => true,
                };
                if permitted {
                    g.add_edge(l_out(r.0), l_in(q.0), WIDE);
                }
            }
        }
    }
    g.max_flow(0, sink)
}

/// Exact achievable rate per receiver under `a`: what ideal coefficients
/// would deliver. The randomized evaluator approaches these values from
/// below with probability tending to 1 in the field size.
pub fn symbolic_rates(
    net: &Network,
    a: &CodingAssignment,
) -> Result<BTreeMap<NodeId, u32>, EvalError> {
    super::count_resources(net, a)?;
    Ok(net.receivers().iter().map(|&r| (r, restricted_flow(net, a, r))).collect())
}

/// Smallest exact achievable rate over all receivers.
pub fn symbolic_min_rate(net: &Network, a: &CodingAssignment) -> Result<u32, EvalError> {
    Ok(symbolic_rates(net, a)?.values().copied().min().unwrap_or(0))
}

/// Exhaustively finds the assignment minimizing (coding nodes, coding links)
/// lexicographically among those whose exact min rate reaches `target`.
/// Refuses search spaces beyond 2^24 assignments; fails when even full
/// coding cannot reach the target.
pub fn brute_force_min_coding(
    net: &Network,
    target: u32,
) -> Result<(usize, usize, CodingAssignment), EvalError> {
    // gene blocks in (node, out-link) order, in-link bit order within each
    let mut blocks: Vec<(NodeId, crate::graph::LinkId, usize)> = Vec::new();
    let mut bits = 0usize;
    for m in net.merging_nodes() {
        for &q in net.out_links(m) {
            blocks.push((m, q, net.in_degree(m)));
            bits += net.in_degree(m);
        }
    }
    if bits > ENUMERATION_LIMIT_BITS {
        return Err(EvalError::TooLarge { bits, limit_bits: ENUMERATION_LIMIT_BITS });
    }
    let eval_target = net.with_target_rate(target);

    let decode = |pattern: u64| -> CodingAssignment {
        let mut masks = BTreeMap::new();
        let mut at = 0;
        for &(m, q, indeg) in &blocks {
            let mask: Vec<bool> = (0..indeg).map(|i| pattern >> (at + i) & 1 == 1).collect();
            at += indeg;
            masks.insert((m, q), mask);
        }
        CodingAssignment { masks }
    };
    let resources = |pattern: u64| -> (usize, usize) {
        let mut nodes = std::collections::BTreeSet::new();
        let mut links = 0;
        let mut at = 0;
        for &(m, _, indeg) in &blocks {
            let mask = (pattern >> at) & ((1u64 << indeg) - 1);
            at += indeg;
            if mask.count_ones() >= 2 {
                links += 1;
                nodes.insert(m);
            }
        }
        (nodes.len(), links)
    };

    // full coding is the capability ceiling: if it cannot reach the target,
    // nothing can
    let all_ones = (1u128 << bits) - 1;
    let all_ones = all_ones as u64;
    let full = decode(all_ones);
    if symbolic_min_rate(&eval_target, &full)? < target {
        return Err(EvalError::InfeasibleTarget { target });
    }
    let mut best = resources(all_ones);
    let mut witness = full;

    for pattern in 0..1u64 << bits {
        let cost = resources(pattern);
        if cost >= best {
            continue;
        }
        let a = decode(pattern);
        if symbolic_min_rate(&eval_target, &a)? >= target {
            best = cost;
            witness = a;
        }
    }
    Ok((best.0, best.1, witness))
}
