//! Local repair of redundant merges. A flow label is attached to every
//! alive link: fresh at the source and at genuinely mixing outputs, copied
//! through forwarding. A merging node receiving the same label on two
//! inputs gains nothing from the second; when an upstream merging node can
//! be rewired to deliver a different label instead, and the exact min rate
//! does not drop, the rewire is applied. Labels treat a link as one flow
//! unit, so on links with capacity above one this is a heuristic; the rate
//! guard keeps it safe.

use super::codec::GenomeLayout;
use crate::eval::{symbolic_min_rate, CodingAssignment, EvalError};
use crate::graph::{Network, NodeId};
use std::collections::{BTreeMap, BTreeSet};

fn link_labels(net: &Network, a: &CodingAssignment) -> Vec<Option<u32>> {
    let mut labels: Vec<Option<u32>> = vec![None; net.links().len()];
    let mut next = 0u32;
    let mut fresh = || {
        next += 1;
        Some(next - 1)
    };
    for &v in net.topo_order() {
        let ins = net.in_links(v);
        for &q in net.out_links(v) {
            if !net.link(q).alive {
                continue;
            }
            labels[q.0] = if v == net.source() {
                fresh()
            } else {
                match a.mask(v, q) {
                    // non-merging with an output has at most one input
                    None => ins
                        .iter()
                        .find(|&&r| net.link(r).alive)
                        .and_then(|&r| labels[r.0]),
                    Some(mask) => {
                        let distinct: BTreeSet<u32> = ins
                            .iter()
                            .enumerate()
                            .filter(|&(i, &r)| mask[i] && net.link(r).alive)
                            .filter_map(|(_, &r)| labels[r.0])
                            .collect();
                        match distinct.len() {
                            0 => None,
                            1 => distinct.first().copied(),
                            _ => fresh(),
                        }
                    }
                }
            };
        }
    }
    labels
}

/// Merging nodes of `net` in topological order whose alive inputs carry a
/// duplicated label, with the offending input links.
fn duplicate_merges(
    net: &Network,
    labels: &[Option<u32>],
) -> Vec<(NodeId, Vec<crate::graph::LinkId>)> {
    let mut merging: Vec<NodeId> = net.merging_nodes();
    merging.sort_by_key(|&m| net.topo_position(m));
    let mut out = Vec::new();
    for m in merging {
        let mut by_label: BTreeMap<u32, Vec<crate::graph::LinkId>> = BTreeMap::new();
        for &r in net.in_links(m) {
            if net.link(r).alive {
                if let Some(l) = labels[r.0] {
                    by_label.entry(l).or_default().push(r);
                }
            }
        }
        let dups: Vec<crate::graph::LinkId> =
            by_label.into_values().filter(|v| v.len() >= 2).flatten().collect();
        if !dups.is_empty() {
            out.push((m, dups));
        }
    }
    out
}

/// Rewires upstream merging nodes until no duplicate-label merge can be
/// fixed without lowering the exact min rate. Works in place on `genes`.
pub fn improve_genes(
    net: &Network,
    layout: &GenomeLayout,
    genes: &mut [bool],
) -> Result<(), EvalError> {
    let mut a = layout.decode(genes);
    let base_rate = symbolic_min_rate(net, &a)?;
    let merging: BTreeSet<NodeId> = net.merging_nodes().into_iter().collect();
    let mut settled: BTreeSet<NodeId> = BTreeSet::new();
    // each pass either rewires (strictly fewer duplicates at one node) or
    // settles a node; the cap is a backstop against label churn upstream
    let mut budget = 4 * layout.bits() + 8;
    while budget > 0 {
        budget -= 1;
        let labels = link_labels(net, &a);
        let Some((node, dup_links)) = duplicate_merges(net, &labels)
            .into_iter()
            .find(|(m, _)| !settled.contains(m))
        else {
            break;
        };
        let in_label_set: BTreeSet<u32> = net
            .in_links(node)
            .iter()
            .filter(|&&r| net.link(r).alive)
            .filter_map(|&r| labels[r.0])
            .collect();
        let mut rewired = false;
        'rewire: for &r in &dup_links {
            let tail = net.link(r).tail;
            if tail == net.source() || !merging.contains(&tail) {
                continue;
            }
            let tail_ins = net.in_links(tail);
            for (bit, &cand) in tail_ins.iter().enumerate() {
                if !net.link(cand).alive {
                    continue;
                }
                let Some(delivered) = labels[cand.0] else { continue };
                if in_label_set.contains(&delivered) {
                    continue;
                }
                let mut mask = vec![false; tail_ins.len()];
                mask[bit] = true;
                let old = a.mask(tail, r).expect("tail is merging").to_vec();
                if old == mask {
                    continue;
                }
                a.set_mask(tail, r, mask);
                if symbolic_min_rate(net, &a)? >= base_rate {
                    rewired = true;
                    break 'rewire;
                }
                a.set_mask(tail, r, old);
            }
        }
        if !rewired {
            settled.insert(node);
        }
    }
    genes.copy_from_slice(&layout.encode(&a));
    Ok(())
}
