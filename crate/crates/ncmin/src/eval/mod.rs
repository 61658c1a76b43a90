//! Coding assignments and their evaluation.
//!
//! A `CodingAssignment` gives every (merging node, outgoing link) pair a
//! contribution mask over the node's incoming links. A mask with two or more
//! bits set makes that outgoing link a coding link (its packets are linear
//! combinations across several inputs); exactly one bit forwards a single
//! input; zero bits idle the link. The number of coding links and of nodes
//! owning at least one is the resource cost the optimizer minimizes, subject
//! to every receiver still reaching the target multicast rate.

mod estimator;
mod format;
mod oracle;
mod rates;

pub use self::estimator::{estimate_fitness, Estimate, FitnessEstimator};
pub use self::format::{parse_assignment, serialize_assignment};
pub use self::oracle::{brute_force_min_coding, symbolic_min_rate, symbolic_rates};
pub use self::rates::evaluate_rates;

use crate::gf::GfError;
use crate::graph::{LinkId, Network, NodeId};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error("assignment does not match the network: {context}")]
    InconsistentAssignment { context: String },
    #[error("invalid fitness coefficients: {context}")]
    InvalidCoefficients { context: String },
    #[error("search space of 2^{bits} assignments exceeds the 2^{limit_bits} enumeration guard")]
    TooLarge { bits: usize, limit_bits: usize },
    #[error("no assignment reaches target rate {target}")]
    InfeasibleTarget { target: u32 },
    #[error("assignment parse error at line {line}: {context}")]
    AssignmentParse { line: usize, context: String },
}

/// Per-link contribution masks for every merging node of one network.
/// Mask bit i of (node, link) refers to `net.in_links(node)[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodingAssignment {
    masks: BTreeMap<(NodeId, LinkId), Vec<bool>>,
}

impl CodingAssignment {
    /// Validates that `masks` covers exactly the merging structure of `net`:
    /// one mask per (merging node, outgoing link), each as long as the
    /// node's in-degree.
    pub fn new(
        net: &Network,
        masks: BTreeMap<(NodeId, LinkId), Vec<bool>>,
    ) -> Result<CodingAssignment, EvalError> {
        let bad = |context: String| EvalError::InconsistentAssignment { context };
        let mut expected = 0usize;
        for m in net.merging_nodes() {
            let indeg = net.in_degree(m);
            for &q in net.out_links(m) {
                expected += 1;
                match masks.get(&(m, q)) {
                    None => return Err(bad(format!("missing mask for ({m}, {q})"))),
                    Some(mask) if mask.len() != indeg => {
                        return Err(bad(format!(
                            "mask for ({m}, {q}) has {} bits, in-degree is {indeg}",
                            mask.len()
                        )))
                    }
                    Some(_) => {}
                }
            }
        }
        if masks.len() != expected {
            return Err(bad(format!(
                "{} masks given, {} (merging node, out-link) pairs exist",
                masks.len(),
                expected
            )));
        }
        Ok(CodingAssignment { masks })
    }

    /// Full coding: every merging node mixes all of its inputs on every
    /// outgoing link.
    pub fn all_ones(net: &Network) -> CodingAssignment {
        let mut masks = BTreeMap::new();
        for m in net.merging_nodes() {
            for &q in net.out_links(m) {
                masks.insert((m, q), vec![true; net.in_degree(m)]);
            }
        }
        CodingAssignment { masks }
    }

    /// Pure routing: every mask forwards one uniformly chosen input.
    pub fn uniform_single_bit(net: &Network, rng: &mut impl rand::Rng) -> CodingAssignment {
        let mut masks = BTreeMap::new();
        for m in net.merging_nodes() {
            let indeg = net.in_degree(m);
            for &q in net.out_links(m) {
                let mut mask = vec![false; indeg];
                mask[rng.random_range(0..indeg)] = true;
                masks.insert((m, q), mask);
            }
        }
        CodingAssignment { masks }
    }

    pub fn mask(&self, node: NodeId, link: LinkId) -> Option<&[bool]> {
        self.masks.get(&(node, link)).map(Vec::as_slice)
    }

    pub fn masks(&self) -> impl Iterator<Item = (&(NodeId, LinkId), &Vec<bool>)> {
        self.masks.iter()
    }

    pub(crate) fn set_mask(&mut self, node: NodeId, link: LinkId, mask: Vec<bool>) {
        let slot = self.masks.get_mut(&(node, link)).expect("mask exists for this pair");
        debug_assert_eq!(slot.len(), mask.len());
        *slot = mask;
    }

    // caller guarantees the map covers the merging structure exactly
    pub(crate) fn from_covering_masks(
        masks: BTreeMap<(NodeId, LinkId), Vec<bool>>,
    ) -> CodingAssignment {
        CodingAssignment { masks }
    }
}

/// Weights of the piecewise objective plus the target rate they aim for.
/// `a1, a2` weigh achieved rates, `a3, a4` reward low resource use below the
/// target, `a5, a6` do the same above it. Validity requires
/// min(a1, a2) > max(a3, a4) and min(a5, a6) > max(a1, a2) so reaching the
/// target always dominates saving resources.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitnessCoefficients {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub a5: f64,
    pub a6: f64,
    pub target_rate: u32,
}

impl FitnessCoefficients {
    pub fn new(
        a: [f64; 6],
        target_rate: u32,
    ) -> Result<FitnessCoefficients, EvalError> {
        let [a1, a2, a3, a4, a5, a6] = a;
        let bad = |context: &str| EvalError::InvalidCoefficients { context: context.into() };
        if a.iter().any(|&x| !x.is_finite() || x <= 0.0) {
            return Err(bad("all weights must be positive and finite"));
        }
        if a1.min(a2) <= a3.max(a4) {
            return Err(bad("min(a1, a2) must exceed max(a3, a4)"));
        }
        if a5.min(a6) <= a1.max(a2) {
            return Err(bad("min(a5, a6) must exceed max(a1, a2)"));
        }
        if target_rate == 0 {
            return Err(bad("target rate must be at least 1"));
        }
        Ok(FitnessCoefficients { a1, a2, a3, a4, a5, a6, target_rate })
    }

    /// Default weights (10, 10, 1, 1, 100, 100) for a given target rate.
    pub fn with_target(target_rate: u32) -> FitnessCoefficients {
        FitnessCoefficients::new([10.0, 10.0, 1.0, 1.0, 100.0, 100.0], target_rate)
            .expect("default weights satisfy the ordering constraints")
    }
}

/// Everything the optimizer wants to know about one assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct FitnessReport {
    /// Achieved rate per receiver.
    pub achieved: BTreeMap<NodeId, u32>,
    pub min_rate: u32,
    pub avg_rate: f64,
    pub coding_nodes: usize,
    pub coding_links: usize,
    pub objective: f64,
}

/// Counts (coding nodes, coding links): a link codes when its mask has two
/// or more bits set; a node codes when it owns at least one coding link.
pub fn count_resources(
    net: &Network,
    a: &CodingAssignment,
) -> Result<(usize, usize), EvalError> {
    // revalidate against this network; assignments can outlive their origin
    let validated = CodingAssignment::new(net, a.masks.clone())?;
    let mut nodes = std::collections::BTreeSet::new();
    let mut links = 0usize;
    for (&(node, _), mask) in validated.masks() {
        if mask.iter().filter(|&&b| b).count() >= 2 {
            links += 1;
            nodes.insert(node);
        }
    }
    Ok((nodes.len(), links))
}

/// The piecewise objective. Below the target the rate terms dominate and
/// resource terms use the small weights; at or above it the large weights
/// reward shedding resources.
pub fn fitness(
    c: &FitnessCoefficients,
    min_rate: u32,
    avg_rate: f64,
    coding_nodes: usize,
    coding_links: usize,
) -> f64 {
    let rate_terms = c.a1 * f64::from(min_rate) + c.a2 * avg_rate;
    let (rn, rl) = if min_rate < c.target_rate { (c.a3, c.a4) } else { (c.a5, c.a6) };
    rate_terms + rn / (coding_nodes as f64 + 1.0) + rl / (coding_links as f64 + 1.0)
}

/// Achieved rates, resource counts and objective for one assignment.
pub fn report(
    net: &Network,
    a: &CodingAssignment,
    c: &FitnessCoefficients,
    q: u8,
    trials: usize,
    seed: u64,
) -> Result<FitnessReport, EvalError> {
    let achieved = evaluate_rates(net, a, q, trials, seed)?;
    let (coding_nodes, coding_links) = count_resources(net, a)?;
    let min_rate = achieved.values().copied().min().unwrap_or(0);
    let avg_rate = if achieved.is_empty() {
        0.0
    } else {
        achieved.values().map(|&r| f64::from(r)).sum::<f64>() / achieved.len() as f64
    };
    let objective = fitness(c, min_rate, avg_rate, coding_nodes, coding_links);
    Ok(FitnessReport { achieved, min_rate, avg_rate, coding_nodes, coding_links, objective })
}

/// Evaluation defaults: the field and trial count used wherever a caller
/// does not choose their own.
pub const DEFAULT_Q: u8 = 8;
pub const DEFAULT_TRIALS: usize = 3;
const FEASIBILITY_SEED: u64 = 0x6665_6173;

/// True iff every receiver reaches `target` under this assignment, judged
/// by randomized evaluation with the default field and trial count.
pub fn is_feasible(net: &Network, a: &CodingAssignment, target: u32) -> Result<bool, EvalError> {
    let rates = evaluate_rates(net, a, DEFAULT_Q, DEFAULT_TRIALS, FEASIBILITY_SEED)?;
    Ok(rates.values().all(|&r| r >= target))
}
