//! Hom, tensor product and Matlis duality, on modules and on maps.
//!
//! With a presentation `R^s --ρ--> R^t --Π--> M --> 0`, a map `M → N` is the
//! tuple of images of the generators, so `Hom(M, N) = ker(N^t → N^s)` and
//! `M ⊗ N = coker(N^s → N^t)`. The dual `M* = Hom_Z(M, Q/Z)` is the group of
//! functionals on `(Z/m)^n` vanishing on the relations.

use std::sync::Arc;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::linalg::{solve_modulo, solve_rows_modulo, ResidueMatrix};
use crate::module::{power_map_between, subquotient, FiniteModule, ModuleMap, RingMatrix};

/// `Hom(M, N)` as a submodule of `N^t`.
pub struct HomModule {
    pub module: Arc<FiniteModule>,
    /// `Hom(M, N) ↪ N^t`, a map given by the images of the generators of `M`.
    pub embed: ModuleMap,
    pub source: Arc<FiniteModule>,
    pub target: Arc<FiniteModule>,
    basis_maps: Vec<ResidueMatrix>,
}

impl HomModule {
    /// The map `M → N` represented by `h`.
    pub fn to_map(&self, h: &[u64]) -> ModuleMap {
        let m = self.module.modulus();
        let mut f = ResidueMatrix::zeros(m, self.source.dim(), self.target.dim());
        for (c, b) in h.iter().zip(&self.basis_maps) {
            if *c != 0 {
                f = f.add(&b.scale(*c)).expect("same shape");
            }
        }
        ModuleMap::new_unchecked(&self.source, &self.target, f)
    }

    /// Coordinates of `f` in `Hom(M, N)`.
    pub fn from_map(&self, f: &ModuleMap, caps: &Caps) -> Result<Vec<u64>> {
        let gens = &self.source.generators(caps)?.rows;
        let images = gens.mul(f.matrix())?;
        let y: Vec<u64> = images.row_iter().flat_map(|r| self.target.reduce(r)).collect();
        solve_modulo(self.embed.matrix(), &y, self.embed.target().relation_rows())?
            .map(|h| self.module.reduce(&h))
            .ok_or_else(|| Error::Internal("map is not in Hom".into()))
    }

    pub fn order(&self) -> u128 {
        self.module.order()
    }
}

/// Matrix `Φ(y)`: the map `R^t → N` sending the `j`-th basis vector to `y_j`.
fn cover_map(n: &FiniteModule, y: &[u64], t: usize) -> ResidueMatrix {
    let k = n.ring().rank();
    let d = n.dim();
    let mut out = ResidueMatrix::zeros(n.modulus(), t * k, d);
    for j in 0..t {
        let yj = &y[j * d..(j + 1) * d];
        for c in 0..k {
            let v = n.action()[c].apply(yj);
            out.row_mut(j * k + c).copy_from_slice(&v);
        }
    }
    out
}

pub fn hom(m: &Arc<FiniteModule>, n: &Arc<FiniteModule>, caps: &Caps) -> Result<HomModule> {
    if m.ring() != n.ring() {
        return Err(Error::RingMismatch);
    }
    let pres = m.presentation(caps)?;
    let t = pres.generators.rows();
    let nt = n.power(t);
    let ns = n.power(pres.relations.rows());
    let constraint = power_map_between(n, &pres.relations.transpose(), &nt, &ns);
    let embed = constraint.kernel()?;
    let module = embed.source().clone();
    let mut basis_maps = Vec::with_capacity(module.dim());
    for row in embed.matrix().row_iter() {
        basis_maps.push(pres.section.mul(&cover_map(n, row, t))?);
    }
    Ok(HomModule { module, embed, source: m.clone(), target: n.clone(), basis_maps })
}

/// `M ⊗ N` as a quotient of `N^t`.
pub struct TensorModule {
    pub module: Arc<FiniteModule>,
    /// `N^t ↠ M ⊗ N`; the tuple `(y_j)` represents `Σ g_j ⊗ y_j`.
    pub projection: ModuleMap,
    /// Coordinate lift of the projection.
    pub lift: ResidueMatrix,
    pub left: Arc<FiniteModule>,
    pub right: Arc<FiniteModule>,
}

impl TensorModule {
    pub fn pure(&self, x: &[u64], y: &[u64], caps: &Caps) -> Result<Vec<u64>> {
        let pres = self.left.presentation(caps)?;
        let k = self.left.ring().rank();
        let coeffs = pres.section.apply(x);
        let t = pres.generators.rows();
        let mut v = Vec::with_capacity(t * self.right.dim());
        for j in 0..t {
            v.extend(self.right.act(&coeffs[j * k..(j + 1) * k], y));
        }
        Ok(self.projection.apply(&v))
    }

    pub fn order(&self) -> u128 {
        self.module.order()
    }
}

pub fn tensor(m: &Arc<FiniteModule>, n: &Arc<FiniteModule>, caps: &Caps) -> Result<TensorModule> {
    if m.ring() != n.ring() {
        return Err(Error::RingMismatch);
    }
    let pres = m.presentation(caps)?;
    let nt = n.power(pres.generators.rows());
    let ns = n.power(pres.relations.rows());
    let rel = power_map_between(n, &pres.relations, &ns, &nt);
    let (projection, lift) = rel.cokernel_with_lift()?;
    Ok(TensorModule {
        module: projection.target().clone(),
        projection,
        lift,
        left: m.clone(),
        right: n.clone(),
    })
}

/// Ring matrix `r` with `f(g^X_j) = Σ_i r_ji g^Y_i`.
fn generator_matrix(f: &ModuleMap, caps: &Caps) -> Result<RingMatrix> {
    let gx = &f.source().generators(caps)?.rows;
    let sy = &f.target().presentation(caps)?.section;
    let coords = gx.mul(f.matrix())?.mul(sy)?;
    Ok(RingMatrix::from_free_rows(&coords, f.source().ring().rank()))
}

/// `Hom(f, N): Hom(Y, N) → Hom(X, N)` for `f: X → Y`.
pub fn hom_map_left(f: &ModuleMap, hy: &HomModule, hx: &HomModule, caps: &Caps) -> Result<ModuleMap> {
    let n = &hx.target;
    let r = generator_matrix(f, caps)?;
    let pm = power_map_between(n, &r.transpose(), hy.embed.target(), hx.embed.target());
    hy.embed.then(&pm)?.factor_through(&hx.embed)
}

/// `Hom(N, f): Hom(N, X) → Hom(N, Y)` for `f: X → Y`.
pub fn hom_map_right(f: &ModuleMap, hx: &HomModule, hy: &HomModule) -> Result<ModuleMap> {
    let t = hx.embed.target().dim() / f.source().dim().max(1);
    let blocks: Vec<&ResidueMatrix> = std::iter::repeat(f.matrix()).take(t).collect();
    let mat = if t == 0 || f.source().dim() == 0 {
        ResidueMatrix::zeros(f.source().modulus(), hx.embed.target().dim(), hy.embed.target().dim())
    } else {
        ResidueMatrix::block_diag(&blocks)?
    };
    let pm = ModuleMap::new_unchecked(hx.embed.target(), hy.embed.target(), mat);
    hx.embed.then(&pm)?.factor_through(&hy.embed)
}

/// `f ⊗ N: X ⊗ N → Y ⊗ N`.
pub fn tensor_map(f: &ModuleMap, tx: &TensorModule, ty: &TensorModule, caps: &Caps) -> Result<ModuleMap> {
    let n = &tx.right;
    let r = generator_matrix(f, caps)?;
    let pm = power_map_between(n, &r, tx.projection.source(), ty.projection.source());
    let mat = tx.lift.mul(pm.matrix())?.mul(ty.projection.matrix())?;
    Ok(ModuleMap::new_unchecked(&tx.module, &ty.module, mat))
}

/// `M* = Hom_Z(M, Q/Z)`.
pub struct DualModule {
    pub module: Arc<FiniteModule>,
    /// Row `i` is the functional on the coordinates of `M` given by the
    /// `i`-th coordinate vector of `M*`; `φ(x) = x·φᵀ`.
    pub functionals: ResidueMatrix,
    pub of: Arc<FiniteModule>,
}

impl DualModule {
    pub fn evaluate(&self, phi: &[u64], x: &[u64]) -> u64 {
        let m = self.of.modulus();
        let f = self.functionals.apply(phi);
        x.iter().zip(&f).fold(0, |acc, (&a, &b)| (acc + a * b) % m)
    }
}

pub fn dual(m: &Arc<FiniteModule>) -> Result<DualModule> {
    let modulus = m.modulus();
    let n = m.dim();
    let rel = m.relation_rows();
    let kernel = if rel.rows() == 0 {
        ResidueMatrix::identity(modulus, n)
    } else {
        rel.transpose().kernel()
    };
    let action: Vec<ResidueMatrix> = m.action().iter().map(ResidueMatrix::transpose).collect();
    let (module, functionals) =
        subquotient(m.ring(), &ResidueMatrix::zeros(modulus, 0, n), &action, &kernel)?;
    Ok(DualModule { module, functionals, of: m.clone() })
}

/// `f*: N* → M*`, `φ ↦ φ ∘ f`, for `f: M → N`.
pub fn dual_map(f: &ModuleMap, dm: &DualModule, dn: &DualModule) -> Result<ModuleMap> {
    let pulled = dn.functionals.mul(&f.matrix().transpose())?;
    let zero = ResidueMatrix::zeros(f.source().modulus(), 0, f.source().dim());
    let x = solve_rows_modulo(&dm.functionals, &pulled, &zero)?
        .ok_or_else(|| Error::Internal("pulled-back functional is not in M*".into()))?;
    Ok(ModuleMap::new_unchecked(&dn.module, &dm.module, x))
}

/// Evaluation `M → M**`.
pub fn double_dual_map(d1: &DualModule, d2: &DualModule) -> Result<ModuleMap> {
    let m = &d1.of;
    let values = d1.functionals.transpose();
    let zero = ResidueMatrix::zeros(m.modulus(), 0, d1.module.dim());
    let x = solve_rows_modulo(&d2.functionals, &values, &zero)?
        .ok_or_else(|| Error::Internal("evaluation is not a functional on M*".into()))?;
    Ok(ModuleMap::new_unchecked(m, &d2.module, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::ring_from_modulus;

    fn cyclic(r: &Arc<crate::ring::FiniteRing>, a: u64) -> Arc<FiniteModule> {
        FiniteModule::cokernel_of_matrix(r, &RingMatrix::new(1, 1, vec![vec![a]]).unwrap()).unwrap()
    }

    #[test]
    fn hom_and_tensor_of_cyclic_groups() {
        let r = Arc::new(ring_from_modulus(12).unwrap());
        let caps = Caps::default();
        let a = cyclic(&r, 4);
        let b = cyclic(&r, 6);
        assert_eq!(hom(&a, &b, &caps).unwrap().order(), 2);
        assert_eq!(tensor(&a, &b, &caps).unwrap().order(), 2);
        assert_eq!(hom(&b, &b, &caps).unwrap().order(), 6);
    }

    #[test]
    fn hom_round_trip() {
        let r = Arc::new(ring_from_modulus(8).unwrap());
        let caps = Caps::default();
        let a = cyclic(&r, 4);
        let b = FiniteModule::regular(&r);
        let h = hom(&a, &b, &caps).unwrap();
        assert_eq!(h.order(), 4);
        for e in h.module.elements(1 << 10).unwrap() {
            let f = h.to_map(&e);
            ModuleMap::new(f.source(), f.target(), f.matrix().clone()).unwrap();
            assert_eq!(h.from_map(&f, &caps).unwrap(), h.module.reduce(&e));
        }
    }

    #[test]
    fn dual_of_cyclic() {
        let r = Arc::new(ring_from_modulus(8).unwrap());
        let a = cyclic(&r, 4);
        let d = dual(&a).unwrap();
        assert_eq!(d.module.order(), 4);
        let dd = dual(&d.module).unwrap();
        let ev = double_dual_map(&d, &dd).unwrap();
        assert!(ev.is_isomorphism().unwrap());
    }
}
