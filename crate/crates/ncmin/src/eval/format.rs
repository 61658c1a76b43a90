//! Text format for contribution assignments. One line per (merging node,
//! out-link) pair:
//!
//! ```text
//! mask <node> <out_link> <bits>
//! ```
//!
//! `<bits>` has one character per input link of the node, '0' or '1', first
//! character for the lowest input link id. Lines are emitted in (node,
//! out-link) order; blank lines and `#` comments are accepted when reading
//! but never written.

use super::{CodingAssignment, EvalError};
use crate::graph::{LinkId, Network, NodeId};
use std::collections::BTreeMap;
use std::fmt::Write;

pub fn serialize_assignment(net: &Network, a: &CodingAssignment) -> String {
    let mut out = String::new();
    for (&(node, link), mask) in a.masks() {
        let bits: String = mask.iter().map(|&b| if b { '1' } else { '0' }).collect();
        let _ = writeln!(out, "mask {} {} {}", node.0, link.0, bits);
        let _ = net; // masks are already validated against the network
    }
    out
}

pub fn parse_assignment(net: &Network, text: &str) -> Result<CodingAssignment, EvalError> {
    let mut masks: BTreeMap<(NodeId, LinkId), Vec<bool>> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let keyword = tokens.next().expect("non-empty line has a first token");
        if keyword != "mask" {
            return Err(EvalError::AssignmentParse {
                line,
                context: format!("expected 'mask', found '{keyword}'"),
            });
        }
        let node = parse_num(tokens.next(), line, "node id")?;
        let link = parse_num(tokens.next(), line, "link id")?;
        let bits = tokens.next().ok_or_else(|| EvalError::AssignmentParse {
            line,
            context: "missing bit string".into(),
        })?;
        if let Some(extra) = tokens.next() {
            return Err(EvalError::AssignmentParse {
                line,
                context: format!("unexpected trailing token '{extra}'"),
            });
        }
        let mask = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(EvalError::AssignmentParse {
                    line,
                    context: format!("bit string must be 0s and 1s, found '{other}'"),
                }),
            })
            .collect::<Result<Vec<bool>, EvalError>>()?;
        if masks.insert((NodeId(node), LinkId(link)), mask).is_some() {
            return Err(EvalError::AssignmentParse {
                line,
                context: format!("duplicate mask for node {node} link {link}"),
            });
        }
    }
    CodingAssignment::new(net, masks)
}

fn parse_num(token: Option<&str>, line: usize, what: &str) -> Result<usize, EvalError> {
    let token = token.ok_or_else(|| EvalError::AssignmentParse {
        line,
        context: format!("missing {what}"),
    })?;
    token.parse().map_err(|_| EvalError::AssignmentParse {
        line,
        context: format!("{what} '{token}' is not a number"),
    })
}
