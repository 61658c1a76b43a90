//! Plain-text network files.
//!
//! ```text
//! nodes 7 links 9 source 0 rate 2
//! recv 5
//! recv 6
//! link 0 0 1 1
//! link 1 0 2 1
//! churn 3 6 down
//! ```
//!
//! Header first; `recv` lines (ascending), `link <id> <tail> <head> <cap>`
//! lines (by id), then optional `churn <time> <link> <down|up>` lines in
//! time order. Blank lines and `#` comments are accepted on input and never
//! emitted, so parse followed by serialize reproduces a canonical file
//! byte for byte.

use super::{
    build_network, ChurnAction, ChurnEvent, ChurnSchedule, GraphError, LinkId, Network, NodeId,
};
use std::fmt::Write as _;

/// Canonical text form of a network plus its churn schedule.
pub fn serialize_network(net: &Network, churn: &ChurnSchedule) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "nodes {} links {} source {} rate {}",
        net.node_count(),
        net.links().len(),
        net.source().0,
        net.target_rate()
    );
    for r in net.receivers() {
        let _ = writeln!(out, "recv {}", r.0);
    }
    for l in net.links() {
        let _ = writeln!(out, "link {} {} {} {}", l.id.0, l.tail.0, l.head.0, l.capacity);
    }
    for e in churn.events() {
        let action = match e.action {
            ChurnAction::Down => "down",
            ChurnAction::Up => "up",
        };
        let _ = writeln!(out, "churn {} {} {}", e.time, e.link.0, action);
    }
    out
}

/// Parses the text form. Link ids must cover 0..links exactly; declared
/// counts must match the lines present.
pub fn parse_network(text: &str) -> Result<(Network, ChurnSchedule), GraphError> {
    let err = |line: usize, context: String| GraphError::ParseError { line, context };
    let mut header: Option<(usize, usize, usize, u32)> = None;
    let mut receivers: Vec<NodeId> = Vec::new();
    let mut links: Vec<Option<(NodeId, NodeId, u32)>> = Vec::new();
    let mut events: Vec<ChurnEvent> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens[0] {
            "nodes" => {
                if header.is_some() {
                    return Err(err(line_no, "duplicate header".into()));
                }
                if tokens.len() != 8
                    || tokens[2] != "links"
                    || tokens[4] != "source"
                    || tokens[6] != "rate"
                {
                    return Err(err(
                        line_no,
                        "expected: nodes N links M source S rate R".into(),
                    ));
                }
                let n = parse_num(tokens[1], line_no, "node count")?;
                let m = parse_num(tokens[3], line_no, "link count")?;
                let s = parse_num(tokens[5], line_no, "source")?;
                let r = parse_num(tokens[7], line_no, "rate")? as u32;
                header = Some((n, m, s, r));
                links = vec![None; m];
            }
            "recv" => {
                if tokens.len() != 2 {
                    return Err(err(line_no, "expected: recv <node>".into()));
                }
                receivers.push(NodeId(parse_num(tokens[1], line_no, "receiver")?));
            }
            "link" => {
                if header.is_none() {
                    return Err(err(line_no, "link before header".into()));
                }
                if tokens.len() != 5 {
                    return Err(err(line_no, "expected: link <id> <tail> <head> <cap>".into()));
                }
                let id = parse_num(tokens[1], line_no, "link id")?;
                let tail = parse_num(tokens[2], line_no, "tail")?;
                let head = parse_num(tokens[3], line_no, "head")?;
                let cap = parse_num(tokens[4], line_no, "capacity")? as u32;
                if id >= links.len() {
                    return Err(err(line_no, format!("link id {id} out of declared range")));
                }
                if links[id].is_some() {
                    return Err(err(line_no, format!("duplicate link id {id}")));
                }
                links[id] = Some((NodeId(tail), NodeId(head), cap));
            }
            "churn" => {
                if tokens.len() != 4 {
                    return Err(err(line_no, "expected: churn <time> <link> <down|up>".into()));
                }
                let time = parse_num(tokens[1], line_no, "time")? as u32;
                let link = LinkId(parse_num(tokens[2], line_no, "link")?);
                let action = match tokens[3] {
                    "down" => ChurnAction::Down,
                    "up" => ChurnAction::Up,
                    other => return Err(err(line_no, format!("unknown action {other:?}"))),
                };
                events.push(ChurnEvent { time, link, action });
            }
            other => return Err(err(line_no, format!("unknown directive {other:?}"))),
        }
    }

    let Some((n_nodes, n_links, source, rate)) = header else {
        return Err(err(0, "missing header line".into()));
    };
    let link_list: Vec<(NodeId, NodeId, u32)> = links
        .into_iter()
        .enumerate()
        .map(|(i, l)| l.ok_or_else(|| err(0, format!("link id {i} missing"))))
        .collect::<Result<_, _>>()?;
    if link_list.len() != n_links {
        return Err(err(0, format!("declared {n_links} links, found {}", link_list.len())));
    }
    for e in &events {
        if e.link.0 >= n_links {
            return Err(err(0, format!("churn references unknown link {}", e.link.0)));
        }
    }
    let net = build_network(n_nodes, NodeId(source), &receivers, &link_list, rate)?;
    Ok((net, ChurnSchedule::new(events)))
}

fn parse_num(tok: &str, line: usize, what: &str) -> Result<usize, GraphError> {
    tok.parse::<usize>().map_err(|_| GraphError::ParseError {
        line,
        context: format!("bad {what}: {tok:?}"),
    })
}

#[cfg(test)]
mod tests {
    use super::super::{butterfly, generate_random_dag, ChurnAction, ChurnEvent, ChurnSchedule};
    use super::*;

    #[test]
    fn round_trip_is_identity_on_canonical_form() {
        let net = butterfly();
        let churn = ChurnSchedule::new(vec![
            ChurnEvent { time: 3, link: LinkId(6), action: ChurnAction::Down },
            ChurnEvent { time: 9, link: LinkId(6), action: ChurnAction::Up },
        ]);
        let text = serialize_network(&net, &churn);
        let (parsed_net, parsed_churn) = parse_network(&text).expect("parses");
        assert_eq!(serialize_network(&parsed_net, &parsed_churn), text);
        assert_eq!(parsed_net, net);
        assert_eq!(parsed_churn, churn);
    }

    #[test]
    fn round_trip_on_generated_networks() {
        for seed in 0..20u64 {
            let net = generate_random_dag(12, 24, 4, 2, seed).unwrap();
            let text = serialize_network(&net, &ChurnSchedule::empty());
            let (back, _) = parse_network(&text).unwrap();
            assert_eq!(serialize_network(&back, &ChurnSchedule::empty()), text, "seed {seed}");
        }
    }

    #[test]
    fn comments_and_blanks_accepted() {
        let net = butterfly();
        let text = serialize_network(&net, &ChurnSchedule::empty());
        let noisy = format!("# overlay\n\n{text}\n# end\n");
        let (parsed, _) = parse_network(&noisy).unwrap();
        assert_eq!(parsed, net);
    }

    #[test]
    fn malformed_inputs_report_lines() {
        let cases = [
            ("nodes 3 links 1 source 0\nrecv 2\nlink 0 0 2 1\n", 1),
            ("nodes 3 links 1 source 0 rate 1\nrecv 2\nlink 0 0 x 1\n", 3),
            ("nodes 3 links 1 source 0 rate 1\nrecv 2\nwat 1\n", 3),
            ("nodes 3 links 2 source 0 rate 1\nrecv 2\nlink 0 0 2 1\nlink 0 0 1 1\n", 4),
        ];
        for (text, line) in cases {
            match parse_network(text) {
                Err(GraphError::ParseError { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn structural_errors_surface_after_parse() {
        // valid syntax, but rate 3 exceeds the butterfly min-cut
        let net = butterfly();
        let mut text = serialize_network(&net, &ChurnSchedule::empty());
        text = text.replace("rate 2", "rate 3");
        assert!(matches!(parse_network(&text), Err(GraphError::UnreachableReceiver { .. })));
    }
}
