//! Rings used across the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use sgmod::groebner::{buchberger, build_ring, Polynomial};
use sgmod::ring::ring_from_modulus;
use sgmod::{FiniteModule, FiniteRing, RingMatrix};

/// `F_p[vars]/(gens)`, each generator given as `(exponents, coefficient)` terms.
pub fn quotient(p: u64, vars: &[&str], gens: &[&[(&[u32], i64)]]) -> Arc<FiniteRing> {
    let names = Arc::new(vars.iter().map(|s| s.to_string()).collect::<Vec<_>>());
    let polys: Vec<Polynomial> = gens
        .iter()
        .map(|terms| Polynomial::from_terms(p, names.clone(), terms.iter().map(|(e, c)| (e.to_vec(), *c))).unwrap())
        .collect();
    Arc::new(build_ring(&buchberger(&polys).unwrap()).unwrap())
}

pub fn zmod(n: u64) -> Arc<FiniteRing> {
    Arc::new(ring_from_modulus(n).unwrap())
}

/// `F_2[x]/(x^n)`
pub fn truncated(n: u32) -> Arc<FiniteRing> {
    quotient(2, &["x"], &[&[(&[n], 1)]])
}

/// `F_2[x,y]/(x², y²)`
pub fn two_squares() -> Arc<FiniteRing> {
    quotient(2, &["x", "y"], &[&[(&[2, 0], 1)], &[(&[0, 2], 1)]])
}

/// `F_2[x,y]/(x², xy, y²)`, local with a two-dimensional socle.
pub fn square_zero() -> Arc<FiniteRing> {
    quotient(2, &["x", "y"], &[&[(&[2, 0], 1)], &[(&[1, 1], 1)], &[(&[0, 2], 1)]])
}

pub fn var(r: &FiniteRing, name: &str) -> Vec<u64> {
    r.named(name).unwrap().clone()
}

pub fn power(r: &FiniteRing, name: &str, e: u64) -> Vec<u64> {
    r.pow(&var(r, name), e)
}

pub fn principal(r: &Arc<FiniteRing>, a: Vec<u64>) -> Arc<FiniteModule> {
    FiniteModule::ideal(r, &[a]).unwrap()
}

/// `R/(a)`
pub fn cyclic(r: &Arc<FiniteRing>, a: Vec<u64>) -> Arc<FiniteModule> {
    FiniteModule::cokernel_of_matrix(r, &RingMatrix::new(1, 1, vec![a]).unwrap()).unwrap()
}
