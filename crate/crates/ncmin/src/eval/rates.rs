//! Randomized achieved-rate evaluation. Global coding vectors are propagated
//! through the DAG in topological order; a receiver's achieved rate is the
//! rank of the vectors arriving at it, maximized over independent trials.
//!
//! A capacity-c link carries c channel vectors. The source emits an
//! independent random combination of the `target_rate` basis vectors on each
//! of its outgoing channels. An outgoing link with one permitted input
//! re-mixes only that link's channels (a scalar copy when the input is a
//! single channel); with several permitted inputs it mixes all their
//! channels, which is what makes it a coding link.
//!
//! Every coefficient is keyed by its position (trial, out-link, out-slot,
//! in-link, in-slot) rather than drawn from a shared stream, so removing a
//! link that contributes nothing cannot change any other draw. That makes
//! "downing an unused link leaves the rates bit-identical" a structural
//! property instead of a probabilistic one.

use super::{CodingAssignment, EvalError};
use crate::gf::{Gf, GfMatrix};
use crate::graph::{Network, NodeId};
use std::collections::BTreeMap;

/// Tag for "the source basis" in coefficient keys; no link has this id.
const SOURCE_INPUT: u64 = u64::MAX;
const RATE_TAG: u64 = 0x7261_7465;

/// Achieved rate per receiver under `a`, evaluated `trials` times over
/// GF(2^q) with fresh coefficients and keeping each receiver's maximum.
pub fn evaluate_rates(
    net: &Network,
    a: &CodingAssignment,
    q: u8,
    trials: usize,
    seed: u64,
) -> Result<BTreeMap<NodeId, u32>, EvalError> {
    let field = Gf::new(q)?;
    // validate the assignment against this network up front
    super::count_resources(net, a)?;
    let dim = net.target_rate() as usize;
    let mut best: BTreeMap<NodeId, u32> = net.receivers().iter().map(|&r| (r, 0)).collect();
    for trial in 0..trials {
        let rates = one_trial(net, a, field, dim, seed, trial as u64);
        for (r, rate) in rates {
            let slot = best.get_mut(&r).expect("receiver key exists");
            *slot = (*slot).max(rate);
        }
    }
    Ok(best)
}

fn coeff(field: Gf, seed: u64, trial: u64, out_link: u64, out_slot: u64, in_link: u64, in_slot: u64) -> u16 {
    field.keyed_nonzero(seed, &[RATE_TAG, trial, out_link, out_slot, in_link, in_slot])
}

fn one_trial(
    net: &Network,
    a: &CodingAssignment,
    field: Gf,
    dim: usize,
    seed: u64,
    trial: u64,
) -> BTreeMap<NodeId, u32> {
    // channel vectors per link; empty means the link carries nothing
    let mut carried: Vec<Vec<Vec<u16>>> = vec![Vec::new(); net.links().len()];
    let merging: std::collections::BTreeSet<NodeId> = net.merging_nodes().into_iter().collect();

    for &v in net.topo_order() {
        if v == net.source() {
            for &qid in net.out_links(v) {
                let l = net.link(qid);
                if !l.alive {
                    continue;
                }
                let mut chans = Vec::with_capacity(l.capacity as usize);
                for slot in 0..l.capacity as u64 {
                    let vec: Vec<u16> = (0..dim)
                        .map(|d| coeff(field, seed, trial, qid.0 as u64, slot, SOURCE_INPUT, d as u64))
                        .collect();
                    chans.push(vec);
                }
                carried[qid.0] = chans;
            }
            continue;
        }
        if net.out_links(v).is_empty() {
            continue;
        }
        // channels available on each alive incoming link, in link-id order
        let ins = net.in_links(v);
        for &qid in net.out_links(v) {
            let l = net.link(qid);
            if !l.alive {
                continue;
            }
            let selected: Vec<usize> = match a.mask(v, qid) {
                Some(mask) => {
                    debug_assert!(merging.contains(&v));
                    (0..ins.len()).filter(|&i| mask[i]).collect()
                }
                None => (0..ins.len()).collect(),
            };
            // gather (in-link id, slot, vector) for permitted alive inputs
            let mut inputs: Vec<(u64, u64, &[u16])> = Vec::new();
            for &i in &selected {
                let rid = ins[i];
                if !net.link(rid).alive {
                    continue;
                }
                for (slot, vec) in carried[rid.0].iter().enumerate() {
                    inputs.push((rid.0 as u64, slot as u64, vec.as_slice()));
                }
            }
            if inputs.is_empty() {
                continue;
            }
            let mut chans = Vec::with_capacity(l.capacity as usize);
            for out_slot in 0..l.capacity as u64 {
                let mut acc = vec![0u16; dim];
                for &(rid, rslot, vec) in &inputs {
                    let c = coeff(field, seed, trial, qid.0 as u64, out_slot, rid, rslot);
                    for (x, &y) in acc.iter_mut().zip(vec) {
                        *x = field.add(*x, field.mul(c, y));
                    }
                }
                chans.push(acc);
            }
            carried[qid.0] = chans;
        }
    }

    net.receivers()
        .iter()
        .map(|&r| {
            let mut rows: Vec<Vec<u16>> = Vec::new();
            for &rid in net.in_links(r) {
                if net.link(rid).alive {
                    rows.extend(carried[rid.0].iter().cloned());
                }
            }
            let rank = if rows.is_empty() {
                0
            } else {
                GfMatrix::from_rows(field, &rows).expect("rows share length dim").rank()
            };
            (r, rank as u32)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::{CodingAssignment, DEFAULT_Q, DEFAULT_TRIALS};
    use super::*;
    use crate::graph::{apply_churn, build_network, butterfly, ChurnAction, ChurnEvent, ChurnSchedule, LinkId};
    use std::collections::BTreeMap;

    fn butterfly_mask(bits: [bool; 2]) -> (crate::graph::Network, CodingAssignment) {
        let net = butterfly();
        let mut masks = BTreeMap::new();
        masks.insert((NodeId(3), LinkId(6)), bits.to_vec());
        (net.clone(), CodingAssignment::new(&net, masks).unwrap())
    }

    #[test]
    fn butterfly_full_coding_reaches_rate_two() {
        let (net, a) = butterfly_mask([true, true]);
        let rates = evaluate_rates(&net, &a, DEFAULT_Q, DEFAULT_TRIALS, 1).unwrap();
        assert_eq!(rates[&NodeId(5)], 2);
        assert_eq!(rates[&NodeId(6)], 2);
    }

    #[test]
    fn butterfly_forwarding_starves_one_receiver() {
        // forwarding only the first input duplicates it on both routes to r1
        let (net, a) = butterfly_mask([true, false]);
        let rates = evaluate_rates(&net, &a, DEFAULT_Q, DEFAULT_TRIALS, 1).unwrap();
        assert_eq!(rates[&NodeId(5)], 1);
        assert_eq!(rates[&NodeId(6)], 2);
    }

    #[test]
    fn zero_mask_on_the_only_route_gives_rate_zero() {
        // diamond: both paths meet at the merging node before the receiver
        let n = |i| NodeId(i);
        let net = build_network(
            5,
            n(0),
            &[n(4)],
            &[(n(0), n(1), 1), (n(0), n(2), 1), (n(1), n(3), 1), (n(2), n(3), 1), (n(3), n(4), 2)],
            2,
        )
        .unwrap();
        let mut masks = BTreeMap::new();
        masks.insert((n(3), LinkId(4)), vec![false, false]);
        let a = CodingAssignment::new(&net, masks).unwrap();
        let rates = evaluate_rates(&net, &a, DEFAULT_Q, DEFAULT_TRIALS, 1).unwrap();
        assert_eq!(rates[&n(4)], 0);
        // and the full mask restores the min-cut
        let full = CodingAssignment::all_ones(&net);
        let rates = evaluate_rates(&net, &full, DEFAULT_Q, DEFAULT_TRIALS, 1).unwrap();
        assert_eq!(rates[&n(4)], 2);
    }

    #[test]
    fn rates_never_exceed_max_flow_or_target() {
        for seed in 0..15u64 {
            let net = crate::graph::generate_random_dag(10, 20, 3, 2, seed).unwrap();
            let a = CodingAssignment::all_ones(&net);
            let rates = evaluate_rates(&net, &a, DEFAULT_Q, DEFAULT_TRIALS, seed).unwrap();
            for (&r, &rate) in &rates {
                assert!(rate <= net.max_flow(r).min(net.target_rate()), "seed {seed}");
            }
        }
    }

    #[test]
    fn downing_an_unused_link_changes_nothing() {
        // m1 forwards only its first input; the second input link is unused
        let (net, a) = butterfly_mask([true, false]);
        let baseline = evaluate_rates(&net, &a, DEFAULT_Q, DEFAULT_TRIALS, 9).unwrap();
        let churn = ChurnSchedule::new(vec![ChurnEvent {
            time: 0,
            link: LinkId(5), // b -> m1, masked out
            action: ChurnAction::Down,
        }]);
        let snap = apply_churn(&net, &churn, 0);
        let after = evaluate_rates(&snap, &a, DEFAULT_Q, DEFAULT_TRIALS, 9).unwrap();
        assert_eq!(baseline, after, "a never-contributing link must not matter");
    }

    #[test]
    fn trials_take_the_per_receiver_maximum() {
        let (net, a) = butterfly_mask([true, true]);
        // any single trial is already rank 2 generically; across seeds the
        // max can only grow, never shrink
        for seed in 0..10u64 {
            let one = evaluate_rates(&net, &a, DEFAULT_Q, 1, seed).unwrap();
            let three = evaluate_rates(&net, &a, DEFAULT_Q, 3, seed).unwrap();
            for (r, rate) in one {
                assert!(three[&r] >= rate, "seed {seed}");
            }
        }
    }

    #[test]
    fn capacity_expansion_carries_parallel_information() {
        // single chain with capacity 2 must deliver rank 2
        let n = |i| NodeId(i);
        let net = build_network(3, n(0), &[n(2)], &[(n(0), n(1), 2), (n(1), n(2), 2)], 2).unwrap();
        let a = CodingAssignment::all_ones(&net); // no merging nodes: empty
        let rates = evaluate_rates(&net, &a, DEFAULT_Q, DEFAULT_TRIALS, 3).unwrap();
        assert_eq!(rates[&n(2)], 2);
    }
}
