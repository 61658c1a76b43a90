//! Random linear coding round trip over GF(2^8): split a message into
//! blocks, hand out random combinations, decode after enough innovative
//! packets arrive. Redundant packets are detected before they cost buffer
//! space.

use ncmin::gf::{bytes_to_symbols, symbols_to_bytes, CodingVector, Gf, SegmentDecoder};
use rand::Rng;

const BLOCKS: usize = 4;
const BLOCK_BYTES: usize = 16;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let field = Gf::new(8)?;
    let mut rng = rand::rng();

    let mut content = vec![0u8; BLOCKS * BLOCK_BYTES];
    rng.fill(content.as_mut_slice());
    let blocks: Vec<Vec<u16>> = content
        .chunks(BLOCK_BYTES)
        .map(|chunk| bytes_to_symbols(field, chunk))
        .collect();

    let mut decoder = SegmentDecoder::new(field, BLOCKS, blocks[0].len());
    let mut received = 0;
    let mut redundant = 0;
    while !decoder.is_complete() {
        // a fresh random combination of all four blocks, like a coding
        // node's output packet
        let coeffs: Vec<u16> = (0..BLOCKS).map(|_| field.random(&mut rng)).collect();
        if coeffs.iter().all(|&c| c == 0) {
            continue;
        }
        let mut payload = vec![0u16; blocks[0].len()];
        for (i, &c) in coeffs.iter().enumerate() {
            for (out, &sym) in payload.iter_mut().zip(&blocks[i]) {
                *out = field.add(*out, field.mul(c, sym));
            }
        }
        received += 1;
        if !decoder.receive(CodingVector(coeffs), payload)? {
            redundant += 1;
        }
        println!("packet {received}: rank {}/{BLOCKS}", decoder.rank());
    }

    let decoded = decoder.decode()?;
    let mut out = Vec::new();
    for i in 0..BLOCKS {
        out.extend(symbols_to_bytes(field, decoded.row(i)));
    }
    assert_eq!(out, content);
    println!("decoded {} bytes bit-exact; {redundant} of {received} packets were redundant", out.len());
    Ok(())
}
