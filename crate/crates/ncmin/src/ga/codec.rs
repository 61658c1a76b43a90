//! Genome layout: one bit per (merging node, outgoing link, incoming link)
//! triple. Blocks are concatenated in topological node order, outgoing
//! links in ascending id within a node, incoming link bits in ascending id
//! within a block. The layout is a bijection between bit vectors and
//! contribution assignments of one network.

use crate::eval::CodingAssignment;
use crate::graph::{LinkId, Network, NodeId};
use std::collections::BTreeMap;

/// One contiguous run of genome bits: the mask of `node`'s outgoing `link`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneBlock {
    pub node: NodeId,
    pub link: LinkId,
    pub offset: usize,
    pub width: usize,
}

#[derive(Debug, Clone)]
pub struct GenomeLayout {
    blocks: Vec<GeneBlock>,
    bits: usize,
}

impl GenomeLayout {
    pub fn new(net: &Network) -> GenomeLayout {
        let mut merging = net.merging_nodes();
        merging.sort_by_key(|&m| net.topo_position(m));
        let mut blocks = Vec::new();
        let mut offset = 0;
        for m in merging {
            let width = net.in_degree(m);
            for &q in net.out_links(m) {
                blocks.push(GeneBlock { node: m, link: q, offset, width });
                offset += width;
            }
        }
        GenomeLayout { blocks, bits: offset }
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn blocks(&self) -> &[GeneBlock] {
        &self.blocks
    }

    pub fn decode(&self, genes: &[bool]) -> CodingAssignment {
        assert_eq!(genes.len(), self.bits, "genome length mismatch");
        let mut masks = BTreeMap::new();
        for b in &self.blocks {
            masks.insert((b.node, b.link), genes[b.offset..b.offset + b.width].to_vec());
        }
        CodingAssignment::from_covering_masks(masks)
    }

    pub fn encode(&self, a: &CodingAssignment) -> Vec<bool> {
        let mut genes = vec![false; self.bits];
        for b in &self.blocks {
            let mask = a.mask(b.node, b.link).expect("assignment covers the layout");
            assert_eq!(mask.len(), b.width, "mask width mismatch");
            genes[b.offset..b.offset + b.width].copy_from_slice(mask);
        }
        genes
    }

    /// (coding nodes, coding links) of a genome: a block with two or more
    /// set bits is a coding link, a node owning one a coding node.
    pub fn resources(&self, genes: &[bool]) -> (usize, usize) {
        let mut nodes = std::collections::BTreeSet::new();
        let mut links = 0;
        for b in &self.blocks {
            let ones = genes[b.offset..b.offset + b.width].iter().filter(|&&g| g).count();
            if ones >= 2 {
                links += 1;
                nodes.insert(b.node);
            }
        }
        (nodes.len(), links)
    }
}
