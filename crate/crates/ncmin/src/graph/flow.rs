//! Max-flow over alive links via shortest augmenting paths (Edmonds-Karp).
//! Capacities are integral and small, so this is comfortably fast for every
//! network the toolkit handles.

use super::{Network, NodeId};
use std::collections::VecDeque;

impl Network {
    /// Maximum flow from the source to `to`, counting only alive links.
    pub fn max_flow(&self, to: NodeId) -> u32 {
        if to == self.source() {
            return 0;
        }
        let m = self.links().len();
        // forward residual per link plus a reverse residual for undo steps
        let mut fwd: Vec<u32> =
            self.links().iter().map(|l| if l.alive { l.capacity } else { 0 }).collect();
        let mut rev: Vec<u32> = vec![0; m];
        let mut total = 0u32;
        loop {
            // BFS for an augmenting path; parent[stores] (link, forward?)
            let mut parent: Vec<Option<(usize, bool)>> = vec![None; self.node_count()];
            let mut seen = vec![false; self.node_count()];
            seen[self.source().0] = true;
            let mut queue = VecDeque::from([self.source()]);
            'bfs: while let Some(v) = queue.pop_front() {
                for &lid in self.out_links(v) {
                    let l = self.link(lid);
                    if fwd[lid.0] > 0 && !seen[l.head.0] {
                        seen[l.head.0] = true;
                        parent[l.head.0] = Some((lid.0, true));
                        if l.head == to {
                            break 'bfs;
                        }
                        queue.push_back(l.head);
                    }
                }
                for &lid in self.in_links(v) {
                    let l = self.link(lid);
                    if rev[lid.0] > 0 && !seen[l.tail.0] {
                        seen[l.tail.0] = true;
                        parent[l.tail.0] = Some((lid.0, false));
                        if l.tail == to {
                            break 'bfs;
                        }
                        queue.push_back(l.tail);
                    }
                }
            }
            if !seen[to.0] {
                return total;
            }
            // walk back to find the bottleneck, then apply it
            let mut bottleneck = u32::MAX;
            let mut v = to;
            while v != self.source() {
                let (lid, forward) = parent[v.0].expect("path reaches the source");
                let room = if forward { fwd[lid] } else { rev[lid] };
                bottleneck = bottleneck.min(room);
                v = if forward { self.link(super::LinkId(lid)).tail } else { self.link(super::LinkId(lid)).head };
            }
            let mut v = to;
            while v != self.source() {
                let (lid, forward) = parent[v.0].expect("path reaches the source");
                if forward {
                    fwd[lid] -= bottleneck;
                    rev[lid] += bottleneck;
                } else {
                    rev[lid] -= bottleneck;
                    fwd[lid] += bottleneck;
                }
                v = if forward { self.link(super::LinkId(lid)).tail } else { self.link(super::LinkId(lid)).head };
            }
            total += bottleneck;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{build_network, butterfly, generate_random_dag, LinkId, Network, NodeId};

    /// Exhaustive edge-disjoint path packing, valid for unit capacities.
    /// Exponential; used only on graphs with at most a dozen links.
    fn brute_force_unit_flow(net: &Network, to: NodeId) -> u32 {
        fn all_paths(
            net: &Network,
            at: NodeId,
            to: NodeId,
            used: &mut Vec<bool>,
            cur: &mut Vec<usize>,
            out: &mut Vec<Vec<usize>>,
        ) {
            if at == to {
                out.push(cur.clone());
                return;
            }
            for &lid in net.out_links(at) {
                let l = net.link(lid);
                if !l.alive || used[lid.0] {
                    continue;
                }
                used[lid.0] = true;
                cur.push(lid.0);
                all_paths(net, l.head, to, used, cur, out);
                cur.pop();
                used[lid.0] = false;
            }
        }
        fn pack(paths: &[Vec<usize>], banned: &mut Vec<bool>) -> u32 {
            let mut best = 0;
            for (i, p) in paths.iter().enumerate() {
                if p.iter().any(|&l| banned[l]) {
                    continue;
                }
                for &l in p {
                    banned[l] = true;
                }
                best = best.max(1 + pack(&paths[i + 1..], banned));
                for &l in p {
                    banned[l] = false;
                }
            }
            best
        }
        let mut paths = Vec::new();
        all_paths(net, net.source(), to, &mut vec![false; net.links().len()], &mut Vec::new(), &mut paths);
        pack(&paths, &mut vec![false; net.links().len()])
    }

    #[test]
    fn butterfly_flows() {
        let net = butterfly();
        assert_eq!(net.max_flow(NodeId(5)), 2);
        assert_eq!(net.max_flow(NodeId(6)), 2);
        let mut cut = net.clone();
        cut.set_alive(LinkId(6), false); // m1 -> m2
        assert_eq!(cut.max_flow(NodeId(5)), 1);
        assert_eq!(cut.max_flow(NodeId(6)), 1);
    }

    #[test]
    fn capacities_add_up() {
        let n = |i| NodeId(i);
        // two disjoint routes, one with capacity 3, one with 1
        let net = build_network(
            4,
            n(0),
            &[n(3)],
            &[(n(0), n(1), 3), (n(1), n(3), 2), (n(0), n(2), 1), (n(2), n(3), 1)],
            3,
        )
        .unwrap();
        assert_eq!(net.max_flow(n(3)), 3, "bottlenecked by the capacity-2 middle link plus 1");
    }

    #[test]
    fn agrees_with_path_packing_on_small_unit_graphs() {
        let mut checked = 0;
        for seed in 0..80u64 {
            let Ok(net) = generate_random_dag(6, 9, 2, 1, seed) else { continue };
            if net.links().iter().any(|l| l.capacity > 1) {
                continue; // the packing oracle assumes unit capacities
            }
            for &r in net.receivers() {
                assert_eq!(net.max_flow(r), brute_force_unit_flow(&net, r), "seed {seed} recv {r}");
                checked += 1;
            }
        }
        assert!(checked >= 50, "expected at least 50 oracle comparisons, got {checked}");
    }

    #[test]
    fn flow_to_source_is_zero() {
        let net = butterfly();
        assert_eq!(net.max_flow(net.source()), 0);
    }
}
