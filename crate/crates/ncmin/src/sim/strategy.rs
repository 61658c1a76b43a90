//! Coding-placement strategies compared by the simulator: the optimizer's
//! assignment, random node selection, coding everywhere, and plain
//! forwarding.

use super::SimError;
use crate::eval::{is_feasible, CodingAssignment};
use crate::graph::{Network, NodeId};
use crate::rng::substream;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

const RSN_ORDER_TAG: u64 = 0x72_736e;
const SINGLE_BIT_TAG: u64 = 0x6269_7473;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Strategy {
    /// Assignment found by the genetic search.
    Gans,
    /// `rsn_count` randomly chosen merging nodes mix all inputs, the rest
    /// forward one random input.
    Rsn,
    /// Every merging node mixes all of its inputs.
    Can,
    /// No mixing anywhere: every merging node forwards one random input.
    None,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::Gans, Strategy::Rsn, Strategy::Can, Strategy::None];
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Strategy::Gans => "GANS",
            Strategy::Rsn => "RSN",
            Strategy::Can => "CAN",
            Strategy::None => "NONE",
        };
        f.write_str(name)
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Strategy, String> {
        match s.to_ascii_uppercase().as_str() {
            "GANS" => Ok(Strategy::Gans),
            "RSN" => Ok(Strategy::Rsn),
            "CAN" => Ok(Strategy::Can),
            "NONE" => Ok(Strategy::None),
            other => Err(format!("unknown strategy '{other}' (want GANS, RSN, CAN or NONE)")),
        }
    }
}

// one random input per mask, drawn identically for every rsn_count so that
// raising the count only ever adds mixing
fn single_bit_base(net: &Network, seed: u64) -> CodingAssignment {
    let mut rng = substream(seed, &[SINGLE_BIT_TAG]);
    CodingAssignment::uniform_single_bit(net, &mut rng)
}

/// Picks the nodes that mix under `strategy` and builds the effective
/// assignment the simulator runs with. RSN selections are nested: the
/// first `rsn_count` of one seed-shuffled order.
pub fn select_coding_nodes(
    net: &Network,
    strategy: Strategy,
    rsn_count: usize,
    optimized: Option<&CodingAssignment>,
    seed: u64,
) -> Result<(BTreeSet<NodeId>, CodingAssignment), SimError> {
    let merging = net.merging_nodes();
    match strategy {
        Strategy::Gans => {
            let a = optimized.ok_or(SimError::MissingAssignment)?.clone();
            let mut nodes = BTreeSet::new();
            for (&(node, _), mask) in a.masks() {
                if mask.iter().filter(|&&b| b).count() >= 2 {
                    nodes.insert(node);
                }
            }
            Ok((nodes, a))
        }
        Strategy::Rsn => {
            if rsn_count > merging.len() {
                return Err(SimError::RsnCountTooLarge {
                    count: rsn_count,
                    available: merging.len(),
                });
            }
            let mut order = merging;
            let mut rng = substream(seed, &[RSN_ORDER_TAG]);
            rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut rng);
            let selected: BTreeSet<NodeId> = order.into_iter().take(rsn_count).collect();
            let mut a = single_bit_base(net, seed);
            for &node in &selected {
                for &q in net.out_links(node) {
                    a.set_mask(node, q, vec![true; net.in_degree(node)]);
                }
            }
            Ok((selected, a))
        }
        Strategy::Can => {
            Ok((merging.into_iter().collect(), CodingAssignment::all_ones(net)))
        }
        Strategy::None => Ok((BTreeSet::new(), single_bit_base(net, seed))),
    }
}

/// Smallest rsn_count whose RSN assignment reaches the network's target
/// rate, found by bisection over the nested selections; `None` when even
/// mixing at every merging node falls short.
pub fn min_feasible_rsn(net: &Network, seed: u64) -> Result<Option<usize>, SimError> {
    let target = net.target_rate();
    let feasible = |count: usize| -> Result<bool, SimError> {
        let (_, a) = select_coding_nodes(net, Strategy::Rsn, count, None, seed)?;
        Ok(is_feasible(net, &a, target)?)
    };
    let mut hi = net.merging_nodes().len();
    if !feasible(hi)? {
        return Ok(None);
    }
    let mut lo = 0;
    if feasible(lo)? {
        return Ok(Some(0));
    }
    // invariant: lo infeasible, hi feasible
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if feasible(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::count_resources;
    use crate::graph::{butterfly, generate_random_dag};

    #[test]
    fn names_round_trip() {
        for s in Strategy::ALL {
            assert_eq!(s.to_string().parse::<Strategy>().unwrap(), s);
        }
        assert_eq!("can".parse::<Strategy>().unwrap(), Strategy::Can);
        assert!("fancy".parse::<Strategy>().is_err());
    }

    #[test]
    fn can_marks_every_merging_node() {
        let net = generate_random_dag(12, 24, 3, 2, 1).unwrap();
        let (nodes, a) = select_coding_nodes(&net, Strategy::Can, 0, None, 0).unwrap();
        assert_eq!(nodes, net.merging_nodes().into_iter().collect());
        let (nn, _) = count_resources(&net, &a).unwrap();
        assert_eq!(nn, nodes.len());
    }

    #[test]
    fn forwarding_strategy_codes_nowhere() {
        let net = generate_random_dag(12, 24, 3, 2, 1).unwrap();
        let (nodes, a) = select_coding_nodes(&net, Strategy::None, 0, None, 5).unwrap();
        assert!(nodes.is_empty());
        assert_eq!(count_resources(&net, &a).unwrap(), (0, 0));
    }

    #[test]
    fn rsn_selections_are_nested_and_monotone() {
        let net = generate_random_dag(12, 24, 3, 2, 4).unwrap();
        let total = net.merging_nodes().len();
        assert!(total >= 3);
        let mut previous = BTreeSet::new();
        for count in 0..=total {
            let (nodes, a) = select_coding_nodes(&net, Strategy::Rsn, count, None, 7).unwrap();
            assert_eq!(nodes.len(), count);
            assert!(nodes.is_superset(&previous), "selection not nested at {count}");
            let (nn, _) = count_resources(&net, &a).unwrap();
            assert_eq!(nn, count);
            previous = nodes;
        }
    }

    #[test]
    fn oversized_rsn_count_is_rejected() {
        let net = butterfly();
        assert_eq!(
            select_coding_nodes(&net, Strategy::Rsn, 2, None, 0),
            Err(SimError::RsnCountTooLarge { count: 2, available: 1 })
        );
    }

    #[test]
    fn gans_needs_an_assignment() {
        let net = butterfly();
        assert_eq!(
            select_coding_nodes(&net, Strategy::Gans, 0, None, 0),
            Err(SimError::MissingAssignment)
        );
        let full = CodingAssignment::all_ones(&net);
        let (nodes, a) = select_coding_nodes(&net, Strategy::Gans, 0, Some(&full), 0).unwrap();
        assert_eq!(nodes.len(), 1);
        assert_eq!(a, full);
    }

    #[test]
    fn butterfly_needs_exactly_one_mixing_node() {
        let net = butterfly();
        // rate 2 is unreachable with pure forwarding but reachable with the
        // single merging node mixing
        assert_eq!(min_feasible_rsn(&net, 3).unwrap(), Some(1));
    }

    #[test]
    fn bisection_matches_linear_scan() {
        for seed in 0..6u64 {
            let Ok(net) = generate_random_dag(10, 20, 3, 2, seed) else { continue };
            let total = net.merging_nodes().len();
            let mut scan = None;
            for count in 0..=total {
                let (_, a) = select_coding_nodes(&net, Strategy::Rsn, count, None, seed).unwrap();
                if is_feasible(&net, &a, net.target_rate()).unwrap() {
                    scan = Some(count);
                    break;
                }
            }
            assert_eq!(min_feasible_rsn(&net, seed).unwrap(), scan, "seed {seed}");
        }
    }
}
