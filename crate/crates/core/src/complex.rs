//! Periodic complexes `d_i: P_i → P_{i-1 mod p}` and their verification.
//!
//! One period determines the whole two-sided complex, so exactness (and
//! exactness after `Hom(−, R)` or `− ⊗ R*`) is checked at `p` spots.

use std::sync::Arc;

use crate::caps::Caps;
use crate::certificate::{clamp, Certificate, ComplexData, Disproof};
use crate::error::{Error, Result};
use crate::functor::{dual, hom, hom_map_left, tensor, tensor_map};
use crate::module::{FiniteModule, ModuleMap};
use crate::properties::projective_by_count;
use crate::ring::FiniteRing;

#[derive(Clone, Debug)]
pub struct PeriodicComplex {
    pub terms: Vec<Arc<FiniteModule>>,
    /// `differentials[i]: terms[i] → terms[i-1 mod p]`
    pub differentials: Vec<ModuleMap>,
}

impl PeriodicComplex {
    pub fn new(terms: Vec<Arc<FiniteModule>>, differentials: Vec<ModuleMap>) -> Result<Self> {
        let p = terms.len();
        if p == 0 || differentials.len() != p {
            return Err(Error::DimensionMismatch("a period needs one differential per term".into()));
        }
        for (i, d) in differentials.iter().enumerate() {
            let prev = (i + p - 1) % p;
            if d.source().dim() != terms[i].dim() || d.target().dim() != terms[prev].dim() {
                return Err(Error::InvalidMap(format!("d_{i} does not go from P_{i} to P_{prev}")));
            }
        }
        Ok(Self { terms, differentials })
    }

    pub fn period(&self) -> usize {
        self.terms.len()
    }

    pub fn to_data(&self) -> ComplexData {
        ComplexData {
            terms: self.terms.iter().map(|t| t.to_data()).collect(),
            differentials: self.differentials.iter().map(|d| d.matrix().clone()).collect(),
        }
    }

    /// Rebuilds and validates every term and map.
    pub fn from_data(ring: &Arc<FiniteRing>, data: &ComplexData) -> Result<Self> {
        let terms = data
            .terms
            .iter()
            .map(|t| FiniteModule::from_data(ring, t))
            .collect::<Result<Vec<_>>>()?;
        let p = terms.len();
        if p == 0 || data.differentials.len() != p {
            return Err(Error::DimensionMismatch("a period needs one differential per term".into()));
        }
        let mut diffs = Vec::with_capacity(p);
        for (i, mat) in data.differentials.iter().enumerate() {
            mat.validate()?;
            diffs.push(ModuleMap::new(&terms[i], &terms[(i + p - 1) % p], mat.clone())?);
        }
        Self::new(terms, diffs)
    }

    /// `d_{i+1 mod p}`, the map into `P_i`.
    pub fn incoming(&self, i: usize) -> &ModuleMap {
        &self.differentials[(i + 1) % self.period()]
    }
}

/// `None` when `ker(out) = im(in)`, else the two orders.
fn exactness_defect(input: &ModuleMap, output: &ModuleMap) -> Result<Option<(u128, u128)>> {
    let composite_zero = input.then(output)?.is_zero();
    let ker = output.kernel_order()?;
    let im = input.image_order()?;
    Ok(if composite_zero && ker == im { None } else { Some((ker, im)) })
}

fn check_sequence(stage: &str, pairs: &[(ModuleMap, ModuleMap)]) -> Result<Certificate> {
    for (i, (input, output)) in pairs.iter().enumerate() {
        if let Some((k, im)) = exactness_defect(input, output)? {
            return Ok(Certificate::no(Disproof::NotExact {
                stage: stage.into(),
                index: i,
                kernel_order: clamp(k),
                image_order: clamp(im),
            }));
        }
    }
    Ok(Certificate::yes_plain())
}

pub fn verify_periodic_exact(c: &PeriodicComplex) -> Result<Certificate> {
    let pairs: Vec<_> = (0..c.period())
        .map(|i| (c.incoming(i).clone(), c.differentials[i].clone()))
        .collect();
    check_sequence("complex", &pairs)
}

fn check_terms(c: &PeriodicComplex, caps: &Caps) -> Result<Option<Certificate>> {
    for (i, t) in c.terms.iter().enumerate() {
        if !projective_by_count(t, caps)? {
            return Ok(Some(Certificate::no(Disproof::NonProjectiveTerm { index: i })));
        }
    }
    Ok(None)
}

/// Exact, with projective terms, and still exact after `Hom(−, R)`.
pub fn verify_complete_projective(c: &PeriodicComplex, caps: &Caps) -> Result<Certificate> {
    if let Some(bad) = check_terms(c, caps)? {
        return Ok(bad);
    }
    let exact = verify_periodic_exact(c)?;
    if !exact.is_yes() {
        return Ok(exact);
    }
    let p = c.period();
    let r = FiniteModule::regular(c.terms[0].ring());
    let homs = c.terms.iter().map(|t| hom(t, &r, caps)).collect::<Result<Vec<_>>>()?;
    // Hom(d_i): Hom(P_{i-1}, R) → Hom(P_i, R)
    let duals = (0..p)
        .map(|i| hom_map_left(&c.differentials[i], &homs[(i + p - 1) % p], &homs[i], caps))
        .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<_> = (0..p).map(|i| (duals[i].clone(), duals[(i + 1) % p].clone())).collect();
    check_sequence("Hom(C, R)", &pairs)
}

/// Exact, with projective terms, and still exact after `− ⊗ R*`.
pub fn verify_complete_flat(c: &PeriodicComplex, caps: &Caps) -> Result<Certificate> {
    if let Some(bad) = check_terms(c, caps)? {
        return Ok(bad);
    }
    let exact = verify_periodic_exact(c)?;
    if !exact.is_yes() {
        return Ok(exact);
    }
    let p = c.period();
    let rstar = dual(&FiniteModule::regular(c.terms[0].ring()))?.module;
    let tens = c.terms.iter().map(|t| tensor(t, &rstar, caps)).collect::<Result<Vec<_>>>()?;
    let maps = (0..p)
        .map(|i| tensor_map(&c.differentials[i], &tens[i], &tens[(i + p - 1) % p], caps))
        .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<_> = (0..p).map(|i| (maps[(i + 1) % p].clone(), maps[i].clone())).collect();
    check_sequence("C ⊗ R*", &pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ResidueMatrix;
    use crate::ring::ring_from_modulus;

    #[test]
    fn multiplication_by_two() {
        let caps = Caps::default();
        let r = Arc::new(ring_from_modulus(4).unwrap());
        let f = FiniteModule::regular(&r);
        let two = ModuleMap::new(&f, &f, ResidueMatrix::from_rows(4, 1, &[[2u64]]).unwrap()).unwrap();
        let c = PeriodicComplex::new(vec![f.clone()], vec![two]).unwrap();
        assert!(verify_periodic_exact(&c).unwrap().is_yes());
        assert!(verify_complete_projective(&c, &caps).unwrap().is_yes());
        assert!(verify_complete_flat(&c, &caps).unwrap().is_yes());
        let zero = PeriodicComplex::new(vec![f.clone()], vec![ModuleMap::zero(&f, &f)]).unwrap();
        let v = verify_periodic_exact(&zero).unwrap();
        assert!(matches!(v.disproof, Some(Disproof::NotExact { index: 0, .. })));
        assert!(verify_complete_flat(&zero, &caps).unwrap().is_no());
    }
}
