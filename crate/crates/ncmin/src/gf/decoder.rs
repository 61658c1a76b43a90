//! Incremental segment decoding. A `SegmentDecoder` holds the coded packets
//! accepted so far in reduced row-echelon form, so checking whether a new
//! packet is innovative (raises the rank) costs one row reduction instead of
//! a full re-elimination, and final decoding is a read-off.

use super::{Gf, GfError, GfMatrix};

/// Coefficient vector carried by a coded packet: entry i is the weight of
/// original block i of the segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodingVector(pub Vec<u16>);

impl CodingVector {
    /// Unit vector for an uncoded block.
    pub fn unit(block_count: usize, index: usize) -> CodingVector {
        let mut v = vec![0; block_count];
        v[index] = 1;
        CodingVector(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u16] {
        &self.0
    }
}

/// Rank tracker and decoder for one segment of `block_count` blocks whose
/// payloads are `payload_len` field symbols long.
#[derive(Debug, Clone)]
pub struct SegmentDecoder {
    field: Gf,
    block_count: usize,
    payload_len: usize,
    /// Rows in RREF: strictly increasing pivot columns, unit pivots, zeros
    /// above and below every pivot.
    rows: Vec<(Vec<u16>, Vec<u16>)>,
    pivot_cols: Vec<usize>,
}

impl SegmentDecoder {
    pub fn new(field: Gf, block_count: usize, payload_len: usize) -> SegmentDecoder {
        SegmentDecoder { field, block_count, payload_len, rows: Vec::new(), pivot_cols: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn block_count(&self) -> usize {
        self.block_count
    }

    pub fn is_complete(&self) -> bool {
        self.rows.len() == self.block_count
    }

    /// Reduces (vector, payload) against the stored rows; a zero vector out
    /// means the packet is dependent on what is already held.
    fn reduce(&self, mut v: Vec<u16>, mut p: Vec<u16>) -> (Vec<u16>, Vec<u16>) {
        let f = self.field;
        for (row, &pc) in self.rows.iter().zip(&self.pivot_cols) {
            let factor = v[pc];
            if factor == 0 {
                continue;
            }
            for (x, y) in v.iter_mut().zip(&row.0) {
                *x = f.add(*x, f.mul(factor, *y));
            }
            for (x, y) in p.iter_mut().zip(&row.1) {
                *x = f.add(*x, f.mul(factor, *y));
            }
        }
        (v, p)
    }

    /// True iff receiving this vector now would raise the rank.
    pub fn would_accept(&self, v: &CodingVector) -> bool {
        if v.len() != self.block_count || self.is_complete() {
            return false;
        }
        let (reduced, _) = self.reduce(v.0.clone(), Vec::new());
        reduced.iter().any(|&x| x != 0)
    }

    /// Stores the packet if innovative. Returns `Ok(true)` when stored,
    /// `Ok(false)` when dependent (redundant) and therefore discarded.
    pub fn receive(&mut self, v: CodingVector, payload: Vec<u16>) -> Result<bool, GfError> {
        if v.len() != self.block_count {
            return Err(GfError::DimensionMismatch {
                context: format!("coding vector length {} != block count {}", v.len(), self.block_count),
            });
        }
        if payload.len() != self.payload_len {
            return Err(GfError::DimensionMismatch {
                context: format!("payload length {} != {}", payload.len(), self.payload_len),
            });
        }
        let f = self.field;
        let (mut v, mut p) = self.reduce(v.0, payload);
        let Some(pc) = v.iter().position(|&x| x != 0) else {
            return Ok(false);
        };
        let inv = f.inv(v[pc]).expect("leading entry is nonzero");
        for x in &mut v {
            *x = f.mul(*x, inv);
        }
        for x in &mut p {
            *x = f.mul(*x, inv);
        }
        // eliminate the new pivot from existing rows to keep full RREF
        for (row, _) in self.rows.iter_mut().map(|r| (r, ())) {
            let factor = row.0[pc];
            if factor == 0 {
                continue;
            }
            for (x, y) in row.0.iter_mut().zip(&v) {
                *x = f.add(*x, f.mul(factor, *y));
            }
            for (x, y) in row.1.iter_mut().zip(&p) {
                *x = f.add(*x, f.mul(factor, *y));
            }
        }
        let at = self.pivot_cols.partition_point(|&c| c < pc);
        self.rows.insert(at, (v, p));
        self.pivot_cols.insert(at, pc);
        Ok(true)
    }

    /// Returns the decoded B x S message matrix, or `RankDeficient` if the
    /// held vectors do not yet span the segment.
    pub fn decode(&self) -> Result<GfMatrix, GfError> {
        if !self.is_complete() {
            return Err(GfError::RankDeficient { rank: self.rank(), needed: self.block_count });
        }
        // complete RREF over B columns is the identity, so payload rows are
        // the original blocks in order
        let rows: Vec<Vec<u16>> = self.rows.iter().map(|(_, p)| p.clone()).collect();
        GfMatrix::from_rows(self.field, &rows)
    }
}

/// Rank-based innovativeness check, independent of `SegmentDecoder`'s
/// incremental bookkeeping: true iff `v` is outside the span of `held`.
pub fn is_innovative(field: Gf, v: &CodingVector, held: &[CodingVector]) -> bool {
    let held_rows: Vec<Vec<u16>> = held.iter().map(|h| h.0.clone()).collect();
    let base = match GfMatrix::from_rows(field, &held_rows) {
        Ok(m) => m.rank(),
        Err(_) => return false,
    };
    let mut all = held_rows;
    all.push(v.0.clone());
    match GfMatrix::from_rows(field, &all) {
        Ok(m) => m.rank() == base + 1,
        Err(_) => false,
    }
}

/// Packs raw bytes into field symbols. q = 8 maps one byte per symbol,
/// q = 4 two symbols per byte (high nibble first), q = 16 two bytes per
/// symbol (big-endian, zero-padded at the tail).
pub fn bytes_to_symbols(field: Gf, bytes: &[u8]) -> Vec<u16> {
    match field.q() {
        4 => bytes.iter().flat_map(|&b| [u16::from(b >> 4), u16::from(b & 0x0F)]).collect(),
        8 => bytes.iter().map(|&b| u16::from(b)).collect(),
        16 => bytes
            .chunks(2)
            .map(|c| (u16::from(c[0]) << 8) | c.get(1).copied().map_or(0, u16::from))
            .collect(),
        _ => unreachable!("constructed fields are 4, 8 or 16 bits"),
    }
}

/// Inverse of [`bytes_to_symbols`] up to tail padding for q = 16.
pub fn symbols_to_bytes(field: Gf, symbols: &[u16]) -> Vec<u8> {
    match field.q() {
        4 => symbols
            .chunks(2)
            .map(|c| ((c[0] as u8) << 4) | c.get(1).copied().unwrap_or(0) as u8)
            .collect(),
        8 => symbols.iter().map(|&s| s as u8).collect(),
        16 => symbols.iter().flat_map(|&s| [(s >> 8) as u8, s as u8]).collect(),
        _ => unreachable!("constructed fields are 4, 8 or 16 bits"),
    }
}
