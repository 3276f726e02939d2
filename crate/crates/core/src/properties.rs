//! Projectivity, injectivity, flatness, freeness and isomorphism.
//!
//! Over a finite ring every finitely generated flat module is projective,
//! and `M` is injective exactly when its Matlis dual is projective.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::caps::Caps;
use crate::certificate::{clamp, Certificate, Disproof, Witness};
use crate::error::{Error, Result};
use crate::functor::{dual, hom};
use crate::homological::{residue_module, tor};
use crate::linalg::{solve_modulo, ResidueMatrix};
use crate::module::{FiniteModule, ModuleMap};

pub fn min_generators(m: &FiniteModule, caps: &Caps) -> Result<usize> {
    m.num_generators(caps)
}

/// `|e_i·M| = |e_i·R|^{t_i}` for every local factor: a surjection from a
/// free module of the same order is an isomorphism.
pub fn projective_by_count(m: &FiniteModule, caps: &Caps) -> Result<bool> {
    let ls = m.ring().local_structure(caps)?;
    let gens = m.generators(caps)?;
    let orders = m.local_orders(caps)?;
    Ok(ls
        .factors
        .iter()
        .zip(&gens.local_counts)
        .zip(&orders)
        .all(|((f, &t), &o)| f.order.checked_pow(t as u32) == Some(o)))
}

/// A splitting `s: M → R^t` of the generator cover, if one exists.
///
/// Solves `Σ c_i·(H_i·Π) ≡ I` over a basis `H_i` of `Hom(M, R^t)`.
pub fn projective_section(m: &Arc<FiniteModule>, caps: &Caps) -> Result<(Option<ResidueMatrix>, u128)> {
    let modulus = m.modulus();
    let n = m.dim();
    let pres = m.presentation(caps)?;
    let t = pres.generators.rows();
    let k = m.ring().rank();
    if n == 0 {
        return Ok((Some(ResidueMatrix::zeros(modulus, 0, t * k)), 1));
    }
    let free = FiniteModule::free(m.ring(), t);
    let h = hom(m, &free, caps)?;
    let dim_h = h.module.dim();
    let mut basis = Vec::with_capacity(dim_h);
    let mut system = ResidueMatrix::zeros(modulus, 0, n * n);
    for i in 0..dim_h {
        let mut e = vec![0u64; dim_h];
        e[i] = 1;
        let f = h.to_map(&e).matrix().clone();
        let composite = f.mul(&pres.cover)?;
        let flat: Vec<u64> = composite.row_iter().flatten().copied().collect();
        system.push_row(&flat);
        basis.push(f);
    }
    let rel = m.relation_rows();
    let mut big = ResidueMatrix::zeros(modulus, 0, n * n);
    for i in 0..n {
        for r in rel.row_iter() {
            let mut v = vec![0u64; n * n];
            v[i * n..(i + 1) * n].copy_from_slice(r);
            big.push_row(&v);
        }
    }
    let target: Vec<u64> = ResidueMatrix::identity(modulus, n).row_iter().flatten().copied().collect();
    let sol = solve_modulo(&system, &target, &big)?;
    Ok((
        sol.map(|c| {
            let mut s = ResidueMatrix::zeros(modulus, n, t * k);
            for (ci, f) in c.iter().zip(&basis) {
                if *ci != 0 {
                    s = s.add(&f.scale(*ci)).expect("same shape");
                }
            }
            s
        }),
        h.order(),
    ))
}

pub fn is_projective(m: &Arc<FiniteModule>, caps: &Caps) -> Result<Certificate> {
    match projective_certificate(m, caps) {
        Ok(c) => Ok(c),
        Err(e) => Certificate::from_cap(e),
    }
}

fn projective_certificate(m: &Arc<FiniteModule>, caps: &Caps) -> Result<Certificate> {
    let by_count = projective_by_count(m, caps)?;
    let (section, hom_order) = projective_section(m, caps)?;
    if by_count != section.is_some() {
        return Err(Error::Internal(format!(
            "order count says projective = {by_count}, section search disagrees"
        )));
    }
    let pres = m.presentation(caps)?;
    Ok(match section {
        Some(section) => Certificate::yes(Witness::Section {
            ring: m.ring().to_data(),
            module: m.to_data(),
            cover: pres.cover.clone(),
            section,
        }),
        None => Certificate::no(Disproof::NoSection { free_rank: pres.generators.rows(), hom_order: clamp(hom_order) }),
    })
}

pub fn is_injective(m: &Arc<FiniteModule>, caps: &Caps) -> Result<Certificate> {
    let d = dual(m)?;
    let inner = is_projective(&d.module, caps)?;
    Ok(wrap_dual(m, &d.module, inner))
}

pub(crate) fn wrap_dual(m: &FiniteModule, d: &FiniteModule, inner: Certificate) -> Certificate {
    match inner.status {
        crate::certificate::Status::Yes => Certificate::yes(Witness::Dual {
            ring: m.ring().to_data(),
            module: m.to_data(),
            dual: d.to_data(),
            inner: Box::new(inner.witness.expect("yes carries a witness")),
        }),
        crate::certificate::Status::No => Certificate::no(Disproof::ViaDual {
            inner: Box::new(inner.disproof.expect("no carries a disproof")),
        }),
        crate::certificate::Status::Unknown => inner,
    }
}

/// `Tor_1(M, R/J) = 0`; equivalent to flatness for finite modules.
pub fn flat_by_tor(m: &Arc<FiniteModule>, caps: &Caps) -> Result<bool> {
    let k = residue_module(m.ring(), caps)?;
    Ok(tor(m, &k, 1, caps)?.order() == 1)
}

/// Flat = projective here; the Tor criterion is computed independently and
/// any disagreement is reported as an internal error.
pub fn is_flat(m: &Arc<FiniteModule>, caps: &Caps) -> Result<Certificate> {
    let cert = is_projective(m, caps)?;
    if cert.is_unknown() {
        return Ok(cert);
    }
    let by_tor = match flat_by_tor(m, caps) {
        Ok(b) => b,
        Err(e) => return Certificate::from_cap(e),
    };
    if by_tor != cert.is_yes() {
        return Err(Error::Internal("Tor_1(M, R/J) disagrees with projectivity".into()));
    }
    Ok(cert)
}

pub fn is_free(m: &Arc<FiniteModule>, caps: &Caps) -> Result<Certificate> {
    let t = match m.num_generators(caps) {
        Ok(t) => t,
        Err(e) => return Certificate::from_cap(e),
    };
    let free_order = m.ring().order().saturating_pow(t as u32);
    Ok(if free_order == m.order() {
        Certificate::yes(Witness::Free { ring: m.ring().to_data(), module: m.to_data(), rank: t })
    } else {
        Certificate::no(Disproof::NotFree { order: clamp(m.order()), free_order: clamp(free_order) })
    })
}

pub enum Iso {
    Yes(ModuleMap),
    No(Disproof),
    Unknown(String),
}

impl Iso {
    pub fn is_yes(&self) -> bool {
        matches!(self, Iso::Yes(_))
    }

    pub fn into_certificate(self) -> Certificate {
        match self {
            Iso::Yes(f) => Certificate::yes(Witness::Isomorphism {
                ring: f.source().ring().to_data(),
                source: f.source().to_data(),
                target: f.target().to_data(),
                matrix: f.matrix().clone(),
            }),
            Iso::No(d) => Certificate::no(d),
            Iso::Unknown(c) => Certificate::unknown(c),
        }
    }
}

fn cheap_invariants(m: &FiniteModule, caps: &Caps) -> Result<Vec<(String, u128)>> {
    let mut out = vec![("order".to_string(), m.order())];
    for (i, o) in m.local_orders(caps)?.into_iter().enumerate() {
        out.push((format!("order of factor {i}"), o));
    }
    for (i, &c) in m.generators(caps)?.local_counts.iter().enumerate() {
        out.push((format!("generators at factor {i}"), c as u128));
    }
    out.push(("|J·M|".into(), m.radical_submodule_order(caps)?));
    out.push(("socle order".into(), m.socle_order(caps)?));
    Ok(out)
}

/// Invariant comparison, then random and exhaustive search in `Hom(M, N)`.
pub fn is_isomorphic(m: &Arc<FiniteModule>, n: &Arc<FiniteModule>, caps: &Caps) -> Result<Iso> {
    if m.ring() != n.ring() {
        return Err(Error::RingMismatch);
    }
    match isomorphism_search(m, n, caps) {
        Err(Error::CapExceeded { what, needed, cap }) => {
            Ok(Iso::Unknown(format!("{what}: needs {needed}, cap {cap}")))
        }
        other => other,
    }
}

fn isomorphism_search(m: &Arc<FiniteModule>, n: &Arc<FiniteModule>, caps: &Caps) -> Result<Iso> {
    if m.order() != n.order() {
        return Ok(Iso::No(Disproof::InvariantMismatch {
            invariant: "order".into(),
            left: clamp(m.order()),
            right: clamp(n.order()),
        }));
    }
    for ((name, a), (_, b)) in cheap_invariants(m, caps)?.into_iter().zip(cheap_invariants(n, caps)?) {
        if a != b {
            return Ok(Iso::No(Disproof::InvariantMismatch { invariant: name, left: clamp(a), right: clamp(b) }));
        }
    }
    let h = hom(m, n, caps)?;
    let hmm = hom(m, m, caps)?.order();
    for (name, other) in [("|Hom(M,N)| vs |Hom(M,M)|", h.order()), ("|Hom(N,N)|", hom(n, n, caps)?.order())] {
        if other != hmm {
            return Ok(Iso::No(Disproof::InvariantMismatch { invariant: name.into(), left: clamp(hmm), right: clamp(other) }));
        }
    }
    if m.is_zero() {
        return Ok(Iso::Yes(ModuleMap::zero(m, n)));
    }
    let dim = h.module.dim();
    let modulus = m.modulus();
    let mut rng = ChaCha8Rng::seed_from_u64(caps.seed);
    for _ in 0..caps.iso_trials {
        let v: Vec<u64> = (0..dim).map(|_| rng.gen_range(0..modulus)).collect();
        let f = h.to_map(&v);
        if f.is_isomorphism()? {
            return Ok(Iso::Yes(f));
        }
    }
    let total = h.order();
    if total > caps.hom_maps {
        return Err(Error::CapExceeded { what: "isomorphism search".into(), needed: total, cap: caps.hom_maps });
    }
    for v in h.module.elements(caps.hom_maps)? {
        let f = h.to_map(&v);
        if f.is_isomorphism()? {
            return Ok(Iso::Yes(f));
        }
    }
    Ok(Iso::No(Disproof::ExhaustedHom { maps: clamp(total) }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::RingMatrix;
    use crate::ring::{ring_from_modulus, FiniteRing};

    fn cyclic(r: &Arc<FiniteRing>, a: u64) -> Arc<FiniteModule> {
        FiniteModule::cokernel_of_matrix(r, &RingMatrix::new(1, 1, vec![vec![a]]).unwrap()).unwrap()
    }

    #[test]
    fn projectivity_over_z4_and_z6() {
        let caps = Caps::default();
        let z4 = Arc::new(ring_from_modulus(4).unwrap());
        assert!(is_projective(&FiniteModule::free(&z4, 2), &caps).unwrap().is_yes());
        assert!(is_projective(&cyclic(&z4, 2), &caps).unwrap().is_no());
        assert!(is_injective(&FiniteModule::regular(&z4), &caps).unwrap().is_yes());
        let z6 = Arc::new(ring_from_modulus(6).unwrap());
        let three = FiniteModule::ideal(&z6, &[vec![3]]).unwrap();
        assert_eq!(three.order(), 2);
        assert!(is_projective(&three, &caps).unwrap().is_yes());
        assert!(is_flat(&three, &caps).unwrap().is_yes());
        assert!(is_free(&three, &caps).unwrap().is_no());
    }

    #[test]
    fn isomorphism_tests() {
        let caps = Caps::default();
        let z4 = Arc::new(ring_from_modulus(4).unwrap());
        let a = cyclic(&z4, 2);
        let b = FiniteModule::ideal(&z4, &[vec![2]]).unwrap();
        assert!(is_isomorphic(&a, &b, &caps).unwrap().is_yes());
        let c = FiniteModule::regular(&z4);
        assert!(matches!(is_isomorphic(&a, &c, &caps).unwrap(), Iso::No(_)));
    }
}
