//! Selection, crossover and mutation over bit-vector genomes.

use super::codec::GenomeLayout;
use rand::Rng;

/// Opposition-based seeding: draw `size` random genomes, pair each with its
/// bitwise complement, and keep the `size` fittest of the doubled pool.
/// `fitness` failures propagate to the caller.
pub fn opposition_init<E>(
    layout: &GenomeLayout,
    size: usize,
    rng: &mut impl Rng,
    mut fitness: impl FnMut(&[bool]) -> Result<f64, E>,
) -> Result<Vec<Vec<bool>>, E> {
    let mut pool: Vec<(Vec<bool>, f64)> = Vec::with_capacity(2 * size);
    for _ in 0..size {
        let genes: Vec<bool> = (0..layout.bits()).map(|_| rng.random()).collect();
        let opposite: Vec<bool> = genes.iter().map(|&g| !g).collect();
        let f = fitness(&genes)?;
        pool.push((genes, f));
        let f = fitness(&opposite)?;
        pool.push((opposite, f));
    }
    sort_desc(&mut pool);
    pool.truncate(size);
    Ok(pool.into_iter().map(|(genes, _)| genes).collect())
}

// fitness descending, genes as deterministic tie-break
fn sort_desc(pool: &mut [(Vec<bool>, f64)]) {
    pool.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
}

/// Fitness-proportional selection. A non-positive total falls back to a
/// uniform draw so selection stays well-defined.
pub fn roulette(fitness: &[f64], rng: &mut impl Rng) -> usize {
    debug_assert!(!fitness.is_empty());
    let total: f64 = fitness.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return rng.random_range(0..fitness.len());
    }
    let mut spin = rng.random::<f64>() * total;
    for (i, f) in fitness.iter().enumerate() {
        spin -= f;
        if spin <= 0.0 {
            return i;
        }
    }
    fitness.len() - 1
}

/// Uniform crossover: positions where the parents agree pass through
/// unchanged, the rest go to the first child from parent one with
/// probability `p_uniform` (the second child takes the other allele).
pub fn uniform_crossover(
    p1: &[bool],
    p2: &[bool],
    p_uniform: f64,
    rng: &mut impl Rng,
) -> (Vec<bool>, Vec<bool>) {
    debug_assert_eq!(p1.len(), p2.len());
    let mut c1 = Vec::with_capacity(p1.len());
    let mut c2 = Vec::with_capacity(p1.len());
    for (&a, &b) in p1.iter().zip(p2) {
        if a == b || rng.random::<f64>() < p_uniform {
            c1.push(a);
            c2.push(b);
        } else {
            c1.push(b);
            c2.push(a);
        }
    }
    (c1, c2)
}

/// Point mutation plus an occasional structural move: with probability
/// `p_struct` one currently-coding node is demoted to pure forwarding, each
/// of its masks collapsing to a single random bit.
pub fn mutate(
    genes: &mut [bool],
    layout: &GenomeLayout,
    p_bit: f64,
    p_struct: f64,
    rng: &mut impl Rng,
) {
    for g in genes.iter_mut() {
        if rng.random::<f64>() < p_bit {
            *g = !*g;
        }
    }
    if rng.random::<f64>() >= p_struct {
        return;
    }
    let coding: Vec<crate::graph::NodeId> = {
        let mut nodes = std::collections::BTreeSet::new();
        for b in layout.blocks() {
            if genes[b.offset..b.offset + b.width].iter().filter(|&&g| g).count() >= 2 {
                nodes.insert(b.node);
            }
        }
        nodes.into_iter().collect()
    };
    if coding.is_empty() {
        return;
    }
    let node = coding[rng.random_range(0..coding.len())];
    for b in layout.blocks().iter().filter(|b| b.node == node) {
        genes[b.offset..b.offset + b.width].fill(false);
        genes[b.offset + rng.random_range(0..b.width)] = true;
    }
}
