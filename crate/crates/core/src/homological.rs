//! Free resolutions, syzygies, Ext and Tor.
//!
//! A resolution is stored as ring matrices `D_i` (`t_i × t_{i-1}`) acting by
//! `x ↦ x·D_i` from `R^{t_i}` to `R^{t_{i-1}}`. Minimal resolutions choose
//! minimal generators of each kernel.

use std::sync::Arc;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::linalg::ResidueMatrix;
use crate::module::{power_map_between, FiniteModule, ModuleMap, RingMatrix};
use crate::ring::FiniteRing;

#[derive(Clone, Debug)]
pub struct FreeResolution {
    pub module: Arc<FiniteModule>,
    /// `D_1, D_2, …`
    pub differentials: Vec<RingMatrix>,
    /// `t_0, t_1, …`
    pub ranks: Vec<usize>,
    /// `Ω^1, Ω^2, …` as submodules of `R^{t_0}, R^{t_1}, …`.
    pub syzygies: Vec<ModuleMap>,
}

impl FreeResolution {
    pub fn ring(&self) -> &Arc<FiniteRing> {
        self.module.ring()
    }

    pub fn len(&self) -> usize {
        self.differentials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.differentials.is_empty()
    }

    /// `Ω^i` (with `Ω^0 = M`).
    pub fn syzygy(&self, i: usize) -> Arc<FiniteModule> {
        if i == 0 {
            self.module.clone()
        } else {
            self.syzygies[i - 1].source().clone()
        }
    }
}

/// Resolution of length `length`; with `padded`, each step carries one
/// redundant generator so the result is not minimal.
pub fn resolution(m: &Arc<FiniteModule>, length: usize, padded: bool, caps: &Caps) -> Result<FreeResolution> {
    let ring = m.ring().clone();
    let k = ring.rank();
    let modulus = ring.characteristic();
    let pres = m.presentation(caps)?;
    let mut gens = pres.generators.clone();
    let mut cover = pres.cover.clone();
    if padded {
        gens.push_row(&vec![0; m.dim()]);
        cover = cover.vstack(&ResidueMatrix::zeros(modulus, k, m.dim()))?;
    }
    let mut ranks = vec![gens.rows()];
    let mut differentials = Vec::new();
    let mut syzygies = Vec::new();
    // kernel of the current map R^{t} → (previous), in R^t coordinates
    let mut kernel_rows = crate::linalg::preimage_of_span(&cover, m.relation_rows())?;
    for _ in 0..length {
        let t = *ranks.last().expect("nonempty");
        let free = FiniteModule::free(&ring, t);
        let sub = free.submodule_from_additive(&kernel_rows)?;
        let mut next = sub.source().generators(caps)?.rows.mul(sub.matrix())?;
        if padded {
            let extra = if next.rows() > 0 { next.row(0).to_vec() } else { vec![0; t * k] };
            next.push_row(&extra);
        }
        let d = RingMatrix::from_free_rows(&next, k);
        let s = next.rows();
        let src = FiniteModule::free(&ring, s);
        let map = power_map_between(&FiniteModule::regular(&ring), &d, &src, &free);
        kernel_rows = map.kernel_rows()?;
        syzygies.push(sub);
        differentials.push(d);
        ranks.push(s);
    }
    Ok(FreeResolution { module: m.clone(), differentials, ranks, syzygies })
}

pub fn minimal_resolution(m: &Arc<FiniteModule>, length: usize, caps: &Caps) -> Result<FreeResolution> {
    resolution(m, length, false, caps)
}

/// `ker(out) / im(in)` for composable `in: A → B`, `out: B → C`.
pub struct Homology {
    pub module: Arc<FiniteModule>,
    /// `Z = ker(out) ↪ B`
    pub cycles: ModuleMap,
    /// `Z ↠ H`
    pub projection: ModuleMap,
    /// Coordinate lift `H → Z`.
    pub lift: ResidueMatrix,
}

impl Homology {
    pub fn order(&self) -> u128 {
        self.module.order()
    }

    /// A cycle in `B` representing the class `h`.
    pub fn representative(&self, h: &[u64]) -> Vec<u64> {
        let z = self.lift.apply(h);
        self.cycles.apply(&z)
    }
}

pub fn homology(input: &ModuleMap, output: &ModuleMap) -> Result<Homology> {
    if input.target().dim() != output.source().dim() {
        return Err(Error::DimensionMismatch("homology of non-composable maps".into()));
    }
    if !input.then(output)?.is_zero() {
        return Err(Error::Internal("composite of consecutive maps is not zero".into()));
    }
    let cycles = output.kernel()?;
    let boundaries = input.factor_through(&cycles)?;
    let (projection, lift) = boundaries.cokernel_with_lift()?;
    Ok(Homology { module: projection.target().clone(), cycles, projection, lift })
}

/// `Ext^i(M, N)` computed from a resolution with at least `i + 1` steps.
pub fn ext_from(res: &FreeResolution, n: &Arc<FiniteModule>, i: usize) -> Result<Homology> {
    if res.len() < i + 1 {
        return Err(Error::Internal("resolution too short for Ext".into()));
    }
    let ring = res.ring();
    if ring != n.ring() {
        return Err(Error::RingMismatch);
    }
    let mid = n.power(res.ranks[i]);
    let next = n.power(res.ranks[i + 1]);
    let out = power_map_between(n, &res.differentials[i].transpose(), &mid, &next);
    let input = if i == 0 {
        ModuleMap::zero(&FiniteModule::zero(ring), &mid)
    } else {
        let prev = n.power(res.ranks[i - 1]);
        power_map_between(n, &res.differentials[i - 1].transpose(), &prev, &mid)
    };
    homology(&input, &out)
}

/// `Tor_i(M, N)` computed from a resolution with at least `i + 1` steps.
pub fn tor_from(res: &FreeResolution, n: &Arc<FiniteModule>, i: usize) -> Result<Homology> {
    if res.len() < i + 1 {
        return Err(Error::Internal("resolution too short for Tor".into()));
    }
    let ring = res.ring();
    if ring != n.ring() {
        return Err(Error::RingMismatch);
    }
    let mid = n.power(res.ranks[i]);
    let higher = n.power(res.ranks[i + 1]);
    let input = power_map_between(n, &res.differentials[i], &higher, &mid);
    let out = if i == 0 {
        ModuleMap::zero(&mid, &FiniteModule::zero(ring))
    } else {
        let lower = n.power(res.ranks[i - 1]);
        power_map_between(n, &res.differentials[i - 1], &mid, &lower)
    };
    homology(&input, &out)
}

pub fn ext(m: &Arc<FiniteModule>, n: &Arc<FiniteModule>, i: usize, caps: &Caps) -> Result<Homology> {
    ext_from(&minimal_resolution(m, i + 1, caps)?, n, i)
}

pub fn tor(m: &Arc<FiniteModule>, n: &Arc<FiniteModule>, i: usize, caps: &Caps) -> Result<Homology> {
    tor_from(&minimal_resolution(m, i + 1, caps)?, n, i)
}

/// `R/J` as a module.
pub fn residue_module(ring: &Arc<FiniteRing>, caps: &Caps) -> Result<Arc<FiniteModule>> {
    let r = FiniteModule::regular(ring);
    let j = ring.local_structure(caps)?.radical.basis().clone();
    Ok(r.quotient_by(&j)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::ring_from_modulus;

    #[test]
    fn ext_and_tor_over_z4() {
        let r = Arc::new(ring_from_modulus(4).unwrap());
        let caps = Caps::default();
        let k = residue_module(&r, &caps).unwrap();
        assert_eq!(k.order(), 2);
        for i in 0..4 {
            assert_eq!(ext(&k, &k, i, &caps).unwrap().order(), 2);
            assert_eq!(tor(&k, &k, i, &caps).unwrap().order(), 2);
        }
        let free = FiniteModule::regular(&r);
        assert_eq!(ext(&k, &free, 1, &caps).unwrap().order(), 1);
        assert_eq!(tor(&free, &k, 1, &caps).unwrap().order(), 1);
    }

    #[test]
    fn padded_resolution_gives_same_ext() {
        let r = Arc::new(ring_from_modulus(8).unwrap());
        let caps = Caps::default();
        let m = FiniteModule::cokernel_of_matrix(&r, &RingMatrix::new(1, 1, vec![vec![2]]).unwrap()).unwrap();
        let n = FiniteModule::cokernel_of_matrix(&r, &RingMatrix::new(1, 1, vec![vec![4]]).unwrap()).unwrap();
        let a = resolution(&m, 4, false, &caps).unwrap();
        let b = resolution(&m, 4, true, &caps).unwrap();
        for i in 0..3 {
            assert_eq!(ext_from(&a, &n, i).unwrap().order(), ext_from(&b, &n, i).unwrap().order());
            assert_eq!(tor_from(&a, &n, i).unwrap().order(), tor_from(&b, &n, i).unwrap().order());
        }
    }
}
