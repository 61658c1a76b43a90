//! Dense row-major matrices over one GF(2^q) field, with the elimination
//! routines the coding pipeline needs: rank, product, and segment
//! encode/decode. Pivoting is deterministic (first nonzero entry, lowest row
//! index) so identical inputs always reduce identically.

use super::{CodingVector, Gf, GfError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GfMatrix {
    field: Gf,
    rows: usize,
    cols: usize,
    data: Vec<u16>,
}

impl GfMatrix {
    pub fn zeros(field: Gf, rows: usize, cols: usize) -> GfMatrix {
        GfMatrix { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: Gf, n: usize) -> GfMatrix {
        let mut m = GfMatrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds from explicit rows; all rows must share one length.
    pub fn from_rows(field: Gf, rows: &[Vec<u16>]) -> Result<GfMatrix, GfError> {
        let cols = rows.first().map_or(0, Vec::len);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(GfError::DimensionMismatch {
                    context: format!("row {i} has {} entries, row 0 has {cols}", r.len()),
                });
            }
        }
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            data.extend_from_slice(r);
        }
        Ok(GfMatrix { field, rows: rows.len(), cols, data })
    }

    pub fn field(&self) -> Gf {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u16 {
        assert!(r < self.rows && c < self.cols);
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u16) {
        assert!(r < self.rows && c < self.cols);
        debug_assert!(v <= self.field.max_value());
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u16] {
        assert!(r < self.rows);
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<u16>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn fill_random(&mut self, rng: &mut impl rand::Rng) {
        for v in &mut self.data {
            *v = self.field.random(rng);
        }
    }

    pub fn mul(&self, rhs: &GfMatrix) -> Result<GfMatrix, GfError> {
        if self.field != rhs.field {
            return Err(GfError::FieldMismatch { left: self.field.q(), right: rhs.field.q() });
        }
        if self.cols != rhs.rows {
            return Err(GfError::DimensionMismatch {
                context: format!(
                    "cannot multiply {}x{} by {}x{}",
                    self.rows, self.cols, rhs.rows, rhs.cols
                ),
            });
        }
        let f = self.field;
        let mut out = GfMatrix::zeros(f, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let cur = out.get(i, j);
                    out.set(i, j, f.add(cur, f.mul(a, rhs.get(k, j))));
                }
            }
        }
        Ok(out)
    }

    /// Rank by forward elimination on a copy. Pivot choice: leftmost column,
    /// first row with a nonzero entry.
    pub fn rank(&self) -> usize {
        let f = self.field;
        let mut m = self.data.clone();
        let (rows, cols) = (self.rows, self.cols);
        let at = |m: &Vec<u16>, r: usize, c: usize| m[r * cols + c];
        let mut pivot_row = 0;
        for col in 0..cols {
            if pivot_row == rows {
                break;
            }
            let Some(src) = (pivot_row..rows).find(|&r| at(&m, r, col) != 0) else {
                continue;
            };
            for c in 0..cols {
                m.swap(pivot_row * cols + c, src * cols + c);
            }
            let pivot = at(&m, pivot_row, col);
            let inv = f.inv(pivot).expect("pivot is nonzero");
            for r in pivot_row + 1..rows {
                let factor = at(&m, r, col);
                if factor == 0 {
                    continue;
                }
                let scale = f.mul(factor, inv);
                for c in col..cols {
                    let v = f.add(at(&m, r, c), f.mul(scale, at(&m, pivot_row, c)));
                    m[r * cols + c] = v;
                }
            }
            pivot_row += 1;
        }
        pivot_row
    }
}

/// Codes a segment: the coded block matrix is `coefficients x message`.
/// `message` is B x S (one original block per row), `coefficients` B' x B.
pub fn encode_segment(message: &GfMatrix, coefficients: &GfMatrix) -> Result<GfMatrix, GfError> {
    coefficients.mul(message)
}

/// Recovers the B x S message matrix from coded blocks tagged with their
/// coding vectors. Fails with `RankDeficient` when the vectors span less
/// than `block_count` dimensions.
pub fn decode_segment(
    field: Gf,
    block_count: usize,
    coded: &[(CodingVector, Vec<u16>)],
) -> Result<GfMatrix, GfError> {
    let mut dec = super::SegmentDecoder::new(
        field,
        block_count,
        coded.first().map_or(0, |(_, p)| p.len()),
    );
    for (v, p) in coded {
        dec.receive(v.clone(), p.clone())?;
    }
    dec.decode()
}
