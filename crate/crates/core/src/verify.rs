//! Re-verification of witnesses from their serialized data alone.

use std::sync::Arc;

use crate::caps::Caps;
use crate::certificate::{Flavor, GWitness, SgWitness, SummandWitness, Witness};
use crate::complex::{verify_complete_flat, verify_complete_projective, PeriodicComplex};
use crate::error::{Error, Result};
use crate::functor::dual;
use crate::homological::{ext, tor};
use crate::linalg::ResidueMatrix;
use crate::module::{FiniteModule, ModuleData, ModuleMap};
use crate::properties::flat_by_tor;
use crate::ring::{FiniteRing, RingData};

fn reject(msg: impl Into<String>) -> Error {
    Error::WitnessRejected(msg.into())
}

fn ensure(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(reject(msg))
    }
}

fn load(ring: &RingData, module: &ModuleData) -> Result<(Arc<FiniteRing>, Arc<FiniteModule>)> {
    let r = Arc::new(FiniteRing::from_data(ring)?);
    let m = FiniteModule::from_data(&r, module)?;
    Ok((r, m))
}

fn map(source: &Arc<FiniteModule>, target: &Arc<FiniteModule>, mat: &ResidueMatrix) -> Result<ModuleMap> {
    mat.validate()?;
    ModuleMap::new(source, target, mat.clone()).map_err(|e| reject(format!("map rejected: {e}")))
}

/// The module a witness speaks about, in serialized form.
pub fn witness_module(w: &Witness) -> &ModuleData {
    match w {
        Witness::Section { module, .. }
        | Witness::TorFlat { module, .. }
        | Witness::Free { module, .. }
        | Witness::Dual { module, .. } => module,
        Witness::SelfExtension(s) => &s.module,
        Witness::Periodic(g) => &g.module,
        Witness::Summand(s) => &s.module,
        Witness::Isomorphism { source, .. } => source,
    }
}

/// Rebuilds every object in `w` and rechecks every claim it makes.
/// Returns `Error::WitnessRejected` (or a validation error) on failure.
pub fn verify_witness(w: &Witness, caps: &Caps) -> Result<()> {
    match w {
        Witness::Section { ring, module, cover, section } => {
            let (r, m) = load(ring, module)?;
            let t = cover.rows() / r.rank().max(1);
            let free = FiniteModule::free(&r, t);
            let pi = map(&free, &m, cover)?;
            let s = map(&m, &free, section)?;
            ensure(s.then(&pi)?.equals(&ModuleMap::identity(&m))?, "section is not a splitting")
        }
        Witness::TorFlat { ring, module } => {
            let (_, m) = load(ring, module)?;
            ensure(flat_by_tor(&m, caps)?, "Tor_1(M, R/J) does not vanish")
        }
        Witness::Free { ring, module, rank } => {
            let (r, m) = load(ring, module)?;
            ensure(m.num_generators(caps)? == *rank, "rank is not the number of generators")?;
            ensure(r.order().checked_pow(*rank as u32) == Some(m.order()), "order is not |R|^rank")
        }
        Witness::Dual { ring, module, dual: d, inner } => {
            let (_, m) = load(ring, module)?;
            ensure(dual(&m)?.module.to_data() == *d, "stored dual differs from the Matlis dual")?;
            ensure(witness_module(inner) == d, "inner witness is about another module")?;
            verify_witness(inner, caps)
        }
        Witness::SelfExtension(s) => verify_sg(s, caps).map(|_| ()),
        Witness::Periodic(g) => verify_periodic(g, caps),
        Witness::Summand(s) => verify_summand(s, caps),
        Witness::Isomorphism { ring, source, target, matrix } => {
            let (r, m) = load(ring, source)?;
            let n = FiniteModule::from_data(&r, target)?;
            ensure(map(&m, &n, matrix)?.is_isomorphism()?, "map is not bijective")
        }
    }
}

fn verify_sg(s: &SgWitness, caps: &Caps) -> Result<Arc<FiniteModule>> {
    let (r, m) = load(&s.ring, &s.module)?;
    let p = FiniteModule::from_data(&r, &s.middle)?;
    let inc = map(&m, &p, &s.inclusion)?;
    let proj = map(&p, &m, &s.projection)?;
    ensure(inc.is_injective()?, "M → P is not injective")?;
    ensure(proj.is_surjective()?, "P → M is not surjective")?;
    ensure(inc.then(&proj)?.is_zero(), "composite M → P → M is not zero")?;
    ensure(p.order() == m.order() * m.order(), "sequence is not exact at P")?;
    ensure(witness_module(&s.middle_witness) == &s.middle, "middle witness is about another module")?;
    verify_witness(&s.middle_witness, caps)?;
    let complex = PeriodicComplex::new(vec![p.clone()], vec![proj.then(&inc)?])?;
    match s.flavor {
        Flavor::Projective => {
            ensure(matches!(*s.middle_witness, Witness::Section { .. } | Witness::Free { .. }), "middle term lacks a projectivity witness")?;
            let rr = FiniteModule::regular(&r);
            ensure(ext(&m, &rr, 1, caps)?.order() == 1, "Ext^1(M, R) does not vanish")?;
            ensure(verify_complete_projective(&complex, caps)?.is_yes(), "spliced complex is not complete")?;
        }
        Flavor::Flat => {
            let rstar = dual(&FiniteModule::regular(&r))?.module;
            ensure(tor(&m, &rstar, 1, caps)?.order() == 1, "Tor_1(M, R*) does not vanish")?;
            ensure(verify_complete_flat(&complex, caps)?.is_yes(), "spliced complex is not complete")?;
        }
    }
    Ok(m)
}

fn verify_periodic(g: &GWitness, caps: &Caps) -> Result<()> {
    let (r, m) = load(&g.ring, &g.module)?;
    let c = PeriodicComplex::from_data(&r, &g.complex)?;
    ensure(verify_complete_projective(&c, caps)?.is_yes(), "complex is not a complete projective resolution")?;
    let last = c.terms.last().expect("nonempty period").clone();
    let emb = map(&m, &last, &g.embedding)?;
    ensure(emb.is_injective()?, "embedding is not injective")?;
    let d0 = &c.differentials[0];
    ensure(emb.image_order()? == d0.image_order()?, "embedding image has the wrong order")?;
    emb.factor_through(&d0.image()?).map_err(|_| reject("embedding image is not Im(d_0)"))?;
    Ok(())
}

fn verify_summand(s: &SummandWitness, caps: &Caps) -> Result<()> {
    ensure(s.sg.module == s.summand_of, "SG witness is about another module")?;
    ensure(s.sg.flavor == Flavor::Projective, "summand needs an SG-projective witness")?;
    let n = verify_sg(&s.sg, caps)?;
    let m = FiniteModule::from_data(n.ring(), &s.module)?;
    let i = map(&m, &n, &s.injection)?;
    let rt = map(&n, &m, &s.retraction)?;
    ensure(i.then(&rt)?.equals(&ModuleMap::identity(&m))?, "retraction ∘ injection ≠ id")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gorenstein::{build_sg_witness_for_projective, classify};
    use crate::ring::ring_from_modulus;

    #[test]
    fn classification_witnesses_verify() {
        let caps = Caps::default();
        let r = Arc::new(ring_from_modulus(4).unwrap());
        for m in [FiniteModule::ideal(&r, &[vec![2]]).unwrap(), FiniteModule::regular(&r)] {
            let c = classify(&m, &caps).unwrap();
            for (name, cert) in c.entries() {
                if let Some(w) = &cert.witness {
                    verify_witness(w, &caps).unwrap_or_else(|e| panic!("{name}: {e}"));
                }
            }
        }
    }

    #[test]
    fn tampered_witness_is_rejected() {
        let caps = Caps::default();
        let r = Arc::new(ring_from_modulus(4).unwrap());
        let mut w = build_sg_witness_for_projective(&FiniteModule::regular(&r), &caps).unwrap();
        w.inclusion = ResidueMatrix::zeros(4, w.inclusion.rows(), w.inclusion.cols());
        assert!(verify_witness(&Witness::SelfExtension(w), &caps).is_err());
    }
}
