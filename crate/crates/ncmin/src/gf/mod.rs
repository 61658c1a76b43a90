//! Arithmetic over the binary extension fields GF(2^q), q in {4, 8, 16}.
//!
//! Addition is XOR. Multiplication uses 64 KiB log/antilog tables for the
//! default q = 8 (built once at first use) and bitwise shift-reduce for the
//! other sizes. Reduction polynomials are the usual irreducible choices:
//! x^4+x+1, x^8+x^4+x^3+x+1 and x^16+x^12+x^3+x+1.

mod decoder;
mod matrix;

pub use self::decoder::{
    bytes_to_symbols, is_innovative, symbols_to_bytes, CodingVector, SegmentDecoder,
};
pub use self::matrix::{decode_segment, encode_segment, GfMatrix};

use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("unsupported field size 2^{0}, expected q in {{4, 8, 16}}")]
    UnsupportedFieldSize(u8),
    #[error("field mismatch: GF(2^{left}) vs GF(2^{right})")]
    FieldMismatch { left: u8, right: u8 },
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },
    #[error("rank {rank} is below the {needed} needed to decode")]
    RankDeficient { rank: usize, needed: usize },
}

const POLY_4: u32 = 0x13;
const POLY_8: u32 = 0x11B;
const POLY_16: u32 = 0x1100B;

/// Field descriptor. Cheap to copy; all element operations hang off it and
/// take raw `u16` values already known to lie below 2^q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gf {
    q: u8,
    poly: u32,
}

struct Tables8 {
    exp: [u16; 510],
    log: [u16; 256],
}

fn tables8() -> &'static Tables8 {
    static TABLES: OnceLock<Tables8> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut exp = [0u16; 510];
        let mut log = [0u16; 256];
        let mut x: u16 = 1;
        for i in 0..255 {
            exp[i] = x;
            log[x as usize] = i as u16;
            x = shift_reduce_mul(x, 3, POLY_8, 8); // 3 generates GF(2^8) under x^8+x^4+x^3+x+1
        }
        for i in 255..510 {
            exp[i] = exp[i - 255];
        }
        Tables8 { exp, log }
    })
}

/// Carry-less "Russian peasant" product reduced modulo `poly`.
fn shift_reduce_mul(a: u16, b: u16, poly: u32, q: u8) -> u16 {
    let mut a = a as u32;
    let mut b = b as u32;
    let mut acc: u32 = 0;
    let high = 1u32 << q;
    while b != 0 {
        if b & 1 != 0 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & high != 0 {
            a ^= poly;
        }
    }
    (acc & (high - 1)) as u16
}

impl Gf {
    /// Field of order 2^q. Only q in {4, 8, 16} is supported.
    pub fn new(q: u8) -> Result<Gf, GfError> {
        let poly = match q {
            4 => POLY_4,
            8 => POLY_8,
            16 => POLY_16,
            other => return Err(GfError::UnsupportedFieldSize(other)),
        };
        Ok(Gf { q, poly })
    }

    /// Default field used throughout the toolkit.
    pub fn gf256() -> Gf {
        Gf { q: 8, poly: POLY_8 }
    }

    pub fn q(self) -> u8 {
        self.q
    }

    /// Number of field elements, 2^q.
    pub fn order(self) -> u32 {
        1 << self.q
    }

    /// Largest representable value, 2^q - 1.
    pub fn max_value(self) -> u16 {
        ((1u32 << self.q) - 1) as u16
    }

    pub fn add(self, a: u16, b: u16) -> u16 {
        a ^ b
    }

    /// Subtraction coincides with addition in characteristic 2.
    pub fn sub(self, a: u16, b: u16) -> u16 {
        a ^ b
    }

    pub fn mul(self, a: u16, b: u16) -> u16 {
        if self.q == 8 {
            if a == 0 || b == 0 {
                return 0;
            }
            let t = tables8();
            t.exp[(t.log[a as usize] + t.log[b as usize]) as usize]
        } else {
            shift_reduce_mul(a, b, self.poly, self.q)
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self, a: u16) -> Option<u16> {
        if a == 0 {
            return None;
        }
        if self.q == 8 {
            let t = tables8();
            return Some(t.exp[(255 - t.log[a as usize]) as usize]);
        }
        // a^(2^q - 2) by square and multiply
        let mut result: u16 = 1;
        let mut base = a;
        let mut e = (1u32 << self.q) - 2;
        while e != 0 {
            if e & 1 != 0 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        Some(result)
    }

    pub fn div(self, a: u16, b: u16) -> Option<u16> {
        self.inv(b).map(|ib| self.mul(a, ib))
    }

    /// Uniform draw over all 2^q values.
    pub fn random(self, rng: &mut impl rand::Rng) -> u16 {
        rng.random_range(0..self.order()) as u16
    }

    /// Uniform draw over the 2^q - 1 nonzero values.
    pub fn random_nonzero(self, rng: &mut impl rand::Rng) -> u16 {
        rng.random_range(1..self.order()) as u16
    }

    /// Nonzero element keyed by an arbitrary tag list: same key, same value.
    /// Used where a draw must not depend on how many draws preceded it.
    pub fn keyed_nonzero(self, seed: u64, tags: &[u64]) -> u16 {
        let mut parts = Vec::with_capacity(tags.len() + 1);
        parts.push(seed);
        parts.extend_from_slice(tags);
        let k = crate::rng::mix(&parts);
        (k % u64::from(self.order() - 1)) as u16 + 1
    }
}

/// A single field element tagged with its field, for code that moves scalars
/// between contexts and needs the mismatch checked rather than assumed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GfElement {
    pub value: u16,
    pub field: Gf,
}

impl GfElement {
    pub fn new(field: Gf, value: u16) -> GfElement {
        debug_assert!(value <= field.max_value());
        GfElement { value, field }
    }

    fn check(self, other: GfElement) -> Result<(), GfError> {
        if self.field != other.field {
            return Err(GfError::FieldMismatch {
                left: self.field.q,
                right: other.field.q,
            });
        }
        Ok(())
    }

    pub fn add(self, other: GfElement) -> Result<GfElement, GfError> {
        self.check(other)?;
        Ok(GfElement::new(self.field, self.field.add(self.value, other.value)))
    }

    pub fn mul(self, other: GfElement) -> Result<GfElement, GfError> {
        self.check(other)?;
        Ok(GfElement::new(self.field, self.field.mul(self.value, other.value)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_gf256_facts() {
        let f = Gf::gf256();
        assert_eq!(f.add(0x57, 0x83), 0xD4);
        assert_eq!(f.mul(0x02, 0x80), 0x1B, "x*x^7 wraps through the reduction polynomial");
        assert_eq!(f.mul(0x00, 0x42), 0x00);
        assert_eq!(f.inv(0x01), Some(0x01));
        assert_eq!(f.inv(0), None);
    }

    #[test]
    fn unsupported_sizes_rejected() {
        assert!(matches!(Gf::new(5), Err(GfError::UnsupportedFieldSize(5))));
        assert!(Gf::new(4).is_ok() && Gf::new(16).is_ok());
    }

    #[test]
    fn table_mul_matches_shift_reduce_exhaustively() {
        let f = Gf::gf256();
        for a in 0..256u32 {
            for b in 0..256u32 {
                assert_eq!(
                    f.mul(a as u16, b as u16),
                    shift_reduce_mul(a as u16, b as u16, POLY_8, 8)
                );
            }
        }
    }

    #[test]
    fn inverses_exhaustive_small_fields() {
        for q in [4u8, 8] {
            let f = Gf::new(q).unwrap();
            for a in 1..f.order() as u16 {
                let ia = f.inv(a).unwrap();
                assert_eq!(f.mul(a, ia), 1, "q={q} a={a:#x}");
            }
        }
    }

    #[test]
    fn element_field_mismatch_detected() {
        let a = GfElement::new(Gf::new(4).unwrap(), 3);
        let b = GfElement::new(Gf::gf256(), 3);
        assert!(matches!(a.add(b), Err(GfError::FieldMismatch { left: 4, right: 8 })));
        assert_eq!(a.add(a).unwrap().value, 0);
    }

    #[test]
    fn keyed_nonzero_is_stable_and_nonzero() {
        let f = Gf::gf256();
        let v1 = f.keyed_nonzero(9, &[1, 2, 3]);
        let v2 = f.keyed_nonzero(9, &[1, 2, 3]);
        assert_eq!(v1, v2);
        assert!(v1 >= 1 && v1 <= f.max_value());
        for t in 0..500u64 {
            assert_ne!(f.keyed_nonzero(9, &[t]), 0);
        }
    }

    fn field_and_pair() -> impl Strategy<Value = (Gf, u16, u16, u16)> {
        prop_oneof![Just(4u8), Just(8u8), Just(16u8)].prop_flat_map(|q| {
            let f = Gf::new(q).unwrap();
            let m = f.max_value();
            (0..=m, 0..=m, 0..=m).prop_map(move |(a, b, c)| (f, a, b, c))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn field_axioms((f, a, b, c) in field_and_pair()) {
            prop_assert_eq!(f.add(a, b), f.add(b, a));
            prop_assert_eq!(f.mul(a, b), f.mul(b, a));
            prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            prop_assert_eq!(f.add(a, 0), a);
            prop_assert_eq!(f.mul(a, 1), a);
            prop_assert_eq!(f.add(a, a), 0);
            if a != 0 {
                let ia = f.inv(a).unwrap();
                prop_assert_eq!(f.mul(a, ia), 1);
            }
        }
    }
}
