//! Seeded random modules: cokernels of small random matrices.
#![allow(dead_code)]

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sgmod::{FiniteModule, FiniteRing, RingMatrix};

pub fn random_element(r: &FiniteRing, rng: &mut impl Rng) -> Vec<u64> {
    (0..r.rank()).map(|_| rng.gen_range(0..r.characteristic())).collect()
}

/// Cokernel of a random `s × t` matrix, `1 ≤ t ≤ max_gens`, `0 ≤ s ≤ max_rels`.
pub fn random_module(r: &Arc<FiniteRing>, seed: u64, max_gens: usize, max_rels: usize) -> Arc<FiniteModule> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = rng.gen_range(1..=max_gens);
    let s = rng.gen_range(0..=max_rels);
    let entries = (0..s * t).map(|_| random_element(r, &mut rng)).collect();
    FiniteModule::cokernel_of_matrix(r, &RingMatrix::new(s, t, entries).unwrap()).unwrap()
}
