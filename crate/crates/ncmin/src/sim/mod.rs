//! Discrete-time swarm simulator. Content is split into blocks, blocks
//! into segments; every non-source peer downloads everything. Rounds are
//! synchronous store-and-forward: links deliver what their tail held at
//! the start of the round, one packet per capacity unit. The source emits
//! fresh random combinations of the segment its neighbor currently needs;
//! a peer's out-link either relays its stored packets round-robin or,
//! where the mask marks the link as coding, emits fresh random
//! combinations of them. A receiving peer keeps a packet only when it
//! raises the rank of the segment's decoder; everything else is counted
//! as redundant traffic.

pub mod compare;
pub mod metrics;
pub mod strategy;

pub use compare::{
    compare_csv, compare_csv_header, compare_strategies, CompareConfig, CompareOutcome,
    CompareRow, StrategySummary,
};
pub use metrics::{metrics_csv_header, metrics_csv_row, SimMetrics};
pub use strategy::{min_feasible_rsn, select_coding_nodes, Strategy};

use crate::eval::{CodingAssignment, EvalError};
use crate::gf::{bytes_to_symbols, CodingVector, Gf, GfError, SegmentDecoder};
use crate::graph::{apply_churn, ChurnSchedule, GraphError, LinkId, Network, NodeId};
use crate::rng::substream;
use rand::Rng;
use std::collections::BTreeMap;
use thiserror::Error;

const CONTENT_TAG: u64 = 0x636f_6e74;
const EMIT_TAG: u64 = 0x656d_6974;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("bad simulation config: {context}")]
    BadConfig { context: String },
    #[error("GANS strategy needs an optimized assignment")]
    MissingAssignment,
    #[error("rsn_count {count} exceeds the {available} merging nodes")]
    RsnCountTooLarge { count: usize, available: usize },
    #[error("peer {peer} decoded content that differs from the source")]
    Corrupt { peer: NodeId },
}

/// Content shape, schedule and bookkeeping knobs for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub content_bytes: usize,
    pub block_bytes: usize,
    pub blocks_per_segment: usize,
    pub q: u8,
    pub churn: ChurnSchedule,
    pub deadline_rounds: u32,
    pub seed: u64,
    /// Keep per-packet trace rows and final buffers in the report.
    pub trace: bool,
}

impl SimConfig {
    pub fn new(content_bytes: usize, block_bytes: usize, blocks_per_segment: usize) -> SimConfig {
        SimConfig {
            content_bytes,
            block_bytes,
            blocks_per_segment,
            q: 8,
            churn: ChurnSchedule::default(),
            deadline_rounds: 10_000,
            seed: 0,
            trace: false,
        }
    }

    pub fn total_blocks(&self) -> usize {
        self.content_bytes.div_ceil(self.block_bytes)
    }

    pub fn segments(&self) -> usize {
        self.total_blocks().div_ceil(self.blocks_per_segment)
    }

    fn validate(&self) -> Result<Gf, SimError> {
        if self.content_bytes == 0 || self.block_bytes == 0 || self.blocks_per_segment == 0 {
            return Err(SimError::BadConfig {
                context: "content, block and segment sizes must be positive".into(),
            });
        }
        Ok(Gf::new(self.q)?)
    }
}

/// One delivered packet, kept when `SimConfig::trace` is set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRow {
    pub round: u32,
    pub link: LinkId,
    pub segment: usize,
    pub innovative: bool,
}

/// Everything a finished run reports. `completions` holds the round each
/// peer finished in; peers missing from it ran out of deadline.
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub metrics: SimMetrics,
    pub rounds: u32,
    pub sent_packets: u64,
    pub redundant_packets: u64,
    pub completions: BTreeMap<NodeId, u32>,
    pub peers: usize,
    pub segments: usize,
    pub total_blocks: usize,
    pub trace: Vec<TraceRow>,
    /// Final innovative rows per peer and segment (vector, payload,
    /// arrival link), kept only when tracing.
    pub buffers: BTreeMap<NodeId, Vec<Vec<(CodingVector, Vec<u16>, LinkId)>>>,
}

/// Deterministic pseudo-random content for a run: what the source serves.
pub fn generate_content(seed: u64, len: usize) -> Vec<u8> {
    let mut rng = substream(seed, &[CONTENT_TAG]);
    let mut bytes = vec![0u8; len];
    rng.fill(bytes.as_mut_slice());
    bytes
}

struct SegmentBuffer {
    decoder: SegmentDecoder,
    rows: Vec<(CodingVector, Vec<u16>, LinkId)>,
    decoded: bool,
}

struct PeerState {
    segments: Vec<SegmentBuffer>,
    decoded_count: usize,
    completion_round: Option<u32>,
}

impl PeerState {
    fn lowest_incomplete(&self) -> Option<usize> {
        self.segments.iter().position(|s| !s.decoded)
    }
}

fn segment_symbol_rows(field: Gf, content: &[u8], cfg: &SimConfig) -> Vec<Vec<Vec<u16>>> {
    let block_symbols = bytes_to_symbols(field, &vec![0u8; cfg.block_bytes]).len();
    let b = cfg.blocks_per_segment;
    (0..cfg.segments())
        .map(|s| {
            (0..b)
                .map(|i| {
                    let start = (s * b + i) * cfg.block_bytes;
                    let mut block = vec![0u8; cfg.block_bytes];
                    if start < content.len() {
                        let end = (start + cfg.block_bytes).min(content.len());
                        block[..end - start].copy_from_slice(&content[start..end]);
                    }
                    let symbols = bytes_to_symbols(field, &block);
                    debug_assert_eq!(symbols.len(), block_symbols);
                    symbols
                })
                .collect()
        })
        .collect()
}

/// Runs one simulation. `assignment` is the effective contribution map,
/// usually from [`select_coding_nodes`]; coding happens exactly where it
/// says. Deterministic in (net, assignment, cfg).
pub fn run_simulation(
    net: &Network,
    assignment: &CodingAssignment,
    cfg: &SimConfig,
) -> Result<SimReport, SimError> {
    let field = cfg.validate()?;
    crate::eval::count_resources(net, assignment)?;
    let b = cfg.blocks_per_segment;
    let segments = cfg.segments();
    let content = generate_content(cfg.seed, cfg.content_bytes);
    let message = segment_symbol_rows(field, &content, cfg);
    let payload_len = message[0][0].len();

    let mut states: BTreeMap<NodeId, PeerState> = net
        .nodes()
        .filter(|&v| v != net.source())
        .map(|v| {
            let segments = (0..segments)
                .map(|_| SegmentBuffer {
                    decoder: SegmentDecoder::new(field, b, payload_len),
                    rows: Vec::new(),
                    decoded: false,
                })
                .collect();
            (v, PeerState { segments, decoded_count: 0, completion_round: None })
        })
        .collect();

    let mut rng = substream(cfg.seed, &[EMIT_TAG]);
    let mut cursors: BTreeMap<(LinkId, usize), usize> = BTreeMap::new();
    let mut sent: u64 = 0;
    let mut redundant: u64 = 0;
    let mut trace = Vec::new();
    let mut rounds = 0;

    for round in 1..=cfg.deadline_rounds {
        rounds = round;
        let snapshot = apply_churn(net, &cfg.churn, round);

        // emissions read only pre-round state
        let mut packets: Vec<(LinkId, usize, CodingVector, Vec<u16>)> = Vec::new();
        for link in snapshot.links().iter().filter(|l| l.alive) {
            let Some(seg) = states[&link.head].lowest_incomplete() else { continue };
            let channels = link.capacity as usize;
            if link.tail == net.source() {
                for _ in 0..channels {
                    let (v, p) = source_packet(field, &message[seg], &mut rng);
                    packets.push((link.id, seg, v, p));
                }
                continue;
            }
            let rows = &states[&link.tail].segments[seg].rows;
            if rows.is_empty() {
                continue;
            }
            // the mask only marks coding links: two or more contributing
            // inputs mean fresh combinations of the stored packets, anything
            // less is plain store-and-forward relaying (protocol links never
            // go silent; the rate model just does not count on them)
            let coding = match assignment.mask(link.tail, link.id) {
                Some(mask) => mask.iter().filter(|&&b| b).count() >= 2,
                None => net.in_degree(link.tail) >= 2,
            };
            if coding {
                for _ in 0..channels {
                    let (v, p) = coded_packet(field, rows, &mut rng);
                    packets.push((link.id, seg, v, p));
                }
            } else {
                // cycle the stored packets in arrival order
                let cursor = cursors.entry((link.id, seg)).or_insert(0);
                for _ in 0..channels {
                    let (v, p, _) = &rows[*cursor % rows.len()];
                    packets.push((link.id, seg, v.clone(), p.clone()));
                    *cursor += 1;
                }
            }
        }

        for (link, seg, vector, payload) in packets {
            sent += 1;
            let head = net.link(link).head;
            let st = states.get_mut(&head).expect("head is a peer");
            let buffer = &mut st.segments[seg];
            let innovative = if buffer.decoded {
                false
            } else {
                buffer.decoder.receive(vector.clone(), payload.clone())?
            };
            if innovative {
                buffer.rows.push((vector, payload, link));
            } else {
                redundant += 1;
            }
            if cfg.trace {
                trace.push(TraceRow { round, link, segment: seg, innovative });
            }
        }

        let mut all_done = true;
        for (&peer, st) in states.iter_mut() {
            for (seg, buffer) in st.segments.iter_mut().enumerate() {
                if !buffer.decoded && buffer.decoder.is_complete() {
                    let decoded = buffer.decoder.decode()?;
                    for (i, row) in message[seg].iter().enumerate() {
                        if decoded.row(i) != row.as_slice() {
                            return Err(SimError::Corrupt { peer });
                        }
                    }
                    buffer.decoded = true;
                    st.decoded_count += 1;
                }
            }
            if st.decoded_count == segments {
                if st.completion_round.is_none() {
                    st.completion_round = Some(round);
                }
            } else {
                all_done = false;
            }
        }
        if all_done {
            break;
        }
    }

    let peers = states.len();
    let completions: BTreeMap<NodeId, u32> = states
        .iter()
        .filter_map(|(&v, st)| st.completion_round.map(|r| (v, r)))
        .collect();
    let decoded_bytes: u64 = states
        .values()
        .map(|st| {
            st.segments
                .iter()
                .enumerate()
                .filter(|(_, sb)| sb.decoded)
                .map(|(s, _)| segment_content_bytes(cfg, s) as u64)
                .sum::<u64>()
        })
        .sum();
    let metrics = metrics::compute_metrics(
        sent,
        peers,
        cfg.total_blocks(),
        &completions,
        decoded_bytes,
        rounds,
    );
    let buffers = if cfg.trace {
        states
            .into_iter()
            .map(|(v, st)| (v, st.segments.into_iter().map(|sb| sb.rows).collect()))
            .collect()
    } else {
        BTreeMap::new()
    };
    Ok(SimReport {
        metrics,
        rounds,
        sent_packets: sent,
        redundant_packets: redundant,
        completions,
        peers,
        segments,
        total_blocks: cfg.total_blocks(),
        trace,
        buffers,
    })
}

// unpadded bytes segment s carries
fn segment_content_bytes(cfg: &SimConfig, s: usize) -> usize {
    let seg_bytes = cfg.blocks_per_segment * cfg.block_bytes;
    cfg.content_bytes.saturating_sub(s * seg_bytes).min(seg_bytes)
}

fn source_packet(
    field: Gf,
    message: &[Vec<u16>],
    rng: &mut impl Rng,
) -> (CodingVector, Vec<u16>) {
    let b = message.len();
    let mut coeffs = vec![0u16; b];
    while coeffs.iter().all(|&c| c == 0) {
        for c in coeffs.iter_mut() {
            *c = field.random(rng);
        }
    }
    let payload = combine(field, &coeffs, |i| &message[i]);
    (CodingVector(coeffs), payload)
}

fn coded_packet(
    field: Gf,
    rows: &[(CodingVector, Vec<u16>, LinkId)],
    rng: &mut impl Rng,
) -> (CodingVector, Vec<u16>) {
    let mut coeffs = vec![0u16; rows.len()];
    while coeffs.iter().all(|&c| c == 0) {
        for c in coeffs.iter_mut() {
            *c = field.random(rng);
        }
    }
    let vector = combine(field, &coeffs, |i| rows[i].0.as_slice());
    let payload = combine(field, &coeffs, |i| rows[i].1.as_slice());
    (CodingVector(vector), payload)
}

fn combine<'a>(field: Gf, coeffs: &[u16], row: impl Fn(usize) -> &'a [u16]) -> Vec<u16> {
    let width = row(0).len();
    let mut out = vec![0u16; width];
    for (i, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        for (o, &x) in out.iter_mut().zip(row(i)) {
            *o = field.add(*o, field.mul(c, x));
        }
    }
    out
}
