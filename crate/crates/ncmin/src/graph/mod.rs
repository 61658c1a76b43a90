//! Overlay network model: a directed acyclic multicast topology with one
//! source, a receiver set, capacitated links and a churn schedule that takes
//! links down and up over time.
//!
//! Node and link identifiers are dense indices. A link of capacity c carries
//! c packets per round; everything downstream treats it as c parallel unit
//! channels. Churn never changes the structure, only the `alive` flags, so
//! genome layouts computed against a network stay valid for every snapshot.

mod flow;
mod format;
mod generate;

pub use self::format::{parse_network, serialize_network};
pub use self::generate::generate_random_dag;

use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinkId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

impl fmt::Display for LinkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "l{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Link {
    pub id: LinkId,
    pub tail: NodeId,
    pub head: NodeId,
    pub capacity: u32,
    pub alive: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("links contain a cycle")]
    CycleDetected,
    #[error("receiver {receiver} has max-flow {flow}, below target rate {needed}")]
    UnreachableReceiver { receiver: NodeId, flow: u32, needed: u32 },
    #[error("receiver set is empty")]
    EmptyReceiverSet,
    #[error("invalid structure: {context}")]
    InvalidStructure { context: String },
    #[error("no feasible topology for the requested parameters")]
    InfeasibleParameters,
    #[error("parse error at line {line}: {context}")]
    ParseError { line: usize, context: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChurnAction {
    Down,
    Up,
}

/// One timed link state change. Times are round numbers; an event is applied
/// at the start of its round, before any traffic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChurnEvent {
    pub time: u32,
    pub link: LinkId,
    pub action: ChurnAction,
}

/// Time-ordered link state changes. Setting a state twice is a no-op, so
/// schedules compose without bookkeeping.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ChurnSchedule {
    events: Vec<ChurnEvent>,
}

impl ChurnSchedule {
    pub fn new(mut events: Vec<ChurnEvent>) -> ChurnSchedule {
        events.sort_by_key(|e| e.time);
        ChurnSchedule { events }
    }

    pub fn empty() -> ChurnSchedule {
        ChurnSchedule::default()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn events(&self) -> &[ChurnEvent] {
        &self.events
    }

    /// Events scheduled exactly at `time`.
    pub fn at(&self, time: u32) -> impl Iterator<Item = &ChurnEvent> {
        self.events.iter().filter(move |e| e.time == time)
    }

    /// Node churn: every link touching `node` goes down at `time`.
    pub fn node_down(net: &Network, node: NodeId, time: u32) -> ChurnSchedule {
        let events = net
            .links()
            .iter()
            .filter(|l| l.tail == node || l.head == node)
            .map(|l| ChurnEvent { time, link: l.id, action: ChurnAction::Down })
            .collect();
        ChurnSchedule::new(events)
    }

    /// Random permanent failures: `count` distinct links chosen uniformly go
    /// down at uniform times in `1..=max_time`. Source-adjacent links are
    /// spared so the swarm never loses its seed entirely.
    pub fn random_downs(net: &Network, count: usize, max_time: u32, seed: u64) -> ChurnSchedule {
        use rand::seq::SliceRandom;
        let mut rng = crate::rng::substream(seed, &[0x6368_7572_6e21]);
        let mut candidates: Vec<LinkId> = net
            .links()
            .iter()
            .filter(|l| l.tail != net.source())
            .map(|l| l.id)
            .collect();
        candidates.shuffle(&mut rng);
        let events = candidates
            .into_iter()
            .take(count)
            .map(|link| ChurnEvent {
                time: rand::Rng::random_range(&mut rng, 1..=max_time.max(1)),
                link,
                action: ChurnAction::Down,
            })
            .collect();
        ChurnSchedule::new(events)
    }
}

/// Directed acyclic overlay with one source and a nonempty receiver set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    node_count: usize,
    links: Vec<Link>,
    source: NodeId,
    receivers: BTreeSet<NodeId>,
    target_rate: u32,
    out_links: Vec<Vec<LinkId>>,
    in_links: Vec<Vec<LinkId>>,
    topo: Vec<NodeId>,
}

/// Validates and indexes a topology. Link ids are assigned by position in
/// `links`. Fails if the graph has a cycle, the source has incoming links,
/// the receiver set is empty or contains the source, or any receiver's
/// max-flow is below `target_rate`.
pub fn build_network(
    node_count: usize,
    source: NodeId,
    receivers: &[NodeId],
    links: &[(NodeId, NodeId, u32)],
    target_rate: u32,
) -> Result<Network, GraphError> {
    let bad = |context: String| GraphError::InvalidStructure { context };
    if source.0 >= node_count {
        return Err(bad(format!("source {source} out of range for {node_count} nodes")));
    }
    if target_rate == 0 {
        return Err(bad("target rate must be at least 1".into()));
    }
    if receivers.is_empty() {
        return Err(GraphError::EmptyReceiverSet);
    }
    let mut receiver_set = BTreeSet::new();
    for &r in receivers {
        if r.0 >= node_count {
            return Err(bad(format!("receiver {r} out of range")));
        }
        if r == source {
            return Err(bad(format!("receiver set contains the source {r}")));
        }
        receiver_set.insert(r);
    }
    let mut link_vec = Vec::with_capacity(links.len());
    let mut out_links = vec![Vec::new(); node_count];
    let mut in_links = vec![Vec::new(); node_count];
    for (i, &(tail, head, capacity)) in links.iter().enumerate() {
        if tail.0 >= node_count || head.0 >= node_count {
            return Err(bad(format!("link {i} endpoint out of range")));
        }
        if tail == head {
            return Err(bad(format!("link {i} is a self-loop at {tail}")));
        }
        if head == source {
            return Err(bad(format!("link {i} enters the source {source}")));
        }
        if capacity == 0 {
            return Err(bad(format!("link {i} has zero capacity")));
        }
        let id = LinkId(i);
        link_vec.push(Link { id, tail, head, capacity, alive: true });
        out_links[tail.0].push(id);
        in_links[head.0].push(id);
    }

    let topo = topological_order(node_count, &link_vec)?;
    let net = Network {
        node_count,
        links: link_vec,
        source,
        receivers: receiver_set,
        target_rate,
        out_links,
        in_links,
        topo,
    };
    net.check_rates()?;
    Ok(net)
}

/// Kahn's algorithm, taking ready nodes in ascending id order so the result
/// is unique for a given graph.
fn topological_order(node_count: usize, links: &[Link]) -> Result<Vec<NodeId>, GraphError> {
    let mut indeg = vec![0usize; node_count];
    for l in links {
        indeg[l.head.0] += 1;
    }
    let mut ready: BTreeSet<usize> =
        (0..node_count).filter(|&n| indeg[n] == 0).collect();
    let mut order = Vec::with_capacity(node_count);
    while let Some(&n) = ready.iter().next() {
        ready.remove(&n);
        order.push(NodeId(n));
        for l in links.iter().filter(|l| l.tail.0 == n) {
            indeg[l.head.0] -= 1;
            if indeg[l.head.0] == 0 {
                ready.insert(l.head.0);
            }
        }
    }
    if order.len() != node_count {
        return Err(GraphError::CycleDetected);
    }
    Ok(order)
}

impl Network {
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.node_count).map(NodeId)
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn receivers(&self) -> &BTreeSet<NodeId> {
        &self.receivers
    }

    pub fn target_rate(&self) -> u32 {
        self.target_rate
    }

    /// Same topology with a different target rate. No revalidation: callers
    /// may deliberately ask for more than the network supports and let the
    /// optimizer report the shortfall.
    pub fn with_target_rate(&self, target_rate: u32) -> Network {
        Network { target_rate, ..self.clone() }
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn link(&self, id: LinkId) -> &Link {
        &self.links[id.0]
    }

    /// Outgoing link ids of `node`, ascending. Structural: ignores churn.
    pub fn out_links(&self, node: NodeId) -> &[LinkId] {
        &self.out_links[node.0]
    }

    /// Incoming link ids of `node`, ascending. Structural: ignores churn.
    /// Mask bit i of a coding assignment refers to the i-th entry here.
    pub fn in_links(&self, node: NodeId) -> &[LinkId] {
        &self.in_links[node.0]
    }

    pub fn in_degree(&self, node: NodeId) -> usize {
        self.in_links[node.0].len()
    }

    pub fn out_degree(&self, node: NodeId) -> usize {
        self.out_links[node.0].len()
    }

    /// Nodes where coding could happen: in-degree >= 2 and out-degree >= 1,
    /// source excluded. Ascending node id.
    pub fn merging_nodes(&self) -> Vec<NodeId> {
        self.nodes()
            .filter(|&n| n != self.source && self.in_degree(n) >= 2 && self.out_degree(n) >= 1)
            .collect()
    }

    /// Unique topological order (ties broken by node id).
    pub fn topo_order(&self) -> &[NodeId] {
        &self.topo
    }

    /// Position of each node in the topological order.
    pub fn topo_position(&self, node: NodeId) -> usize {
        self.topo.iter().position(|&n| n == node).expect("node is in the order")
    }

    /// Longest hop distance from the source to any reachable node over alive
    /// links. A pipeline-fill bound for the simulator.
    pub fn max_hops_from_source(&self) -> u32 {
        let mut dist = vec![u32::MAX; self.node_count];
        dist[self.source.0] = 0;
        let mut queue = std::collections::VecDeque::from([self.source]);
        let mut best = 0;
        while let Some(n) = queue.pop_front() {
            for &lid in self.out_links(n) {
                let l = self.link(lid);
                if !l.alive || dist[l.head.0] != u32::MAX {
                    continue;
                }
                dist[l.head.0] = dist[n.0] + 1;
                best = best.max(dist[l.head.0]);
                queue.push_back(l.head);
            }
        }
        best
    }

    fn set_alive(&mut self, link: LinkId, alive: bool) {
        self.links[link.0].alive = alive;
    }

    fn check_rates(&self) -> Result<(), GraphError> {
        for &r in &self.receivers {
            let flow = self.max_flow(r);
            if flow < self.target_rate {
                return Err(GraphError::UnreachableReceiver {
                    receiver: r,
                    flow,
                    needed: self.target_rate,
                });
            }
        }
        Ok(())
    }
}

/// Snapshot with every event at `time <= now` applied, in time order.
pub fn apply_churn(net: &Network, schedule: &ChurnSchedule, now: u32) -> Network {
    let mut snap = net.clone();
    for e in schedule.events().iter().take_while(|e| e.time <= now) {
        snap.set_alive(e.link, matches!(e.action, ChurnAction::Up));
    }
    snap
}

/// The canonical 7-node example where routing alone cannot reach rate 2 for
/// both receivers but one coding link can. Nodes: 0 source, 1 and 2 relays,
/// 3 the merge point, 4 its successor, 5 and 6 receivers.
pub fn butterfly() -> Network {
    let n = |i| NodeId(i);
    build_network(
        7,
        n(0),
        &[n(5), n(6)],
        &[
            (n(0), n(1), 1), // s -> a
            (n(0), n(2), 1), // s -> b
            (n(1), n(5), 1), // a -> r1
            (n(2), n(6), 1), // b -> r2
            (n(1), n(3), 1), // a -> m1
            (n(2), n(3), 1), // b -> m1
            (n(3), n(4), 1), // m1 -> m2
            (n(4), n(5), 1), // m2 -> r1
            (n(4), n(6), 1), // m2 -> r2
        ],
        2,
    )
    .expect("butterfly is well formed")
}
