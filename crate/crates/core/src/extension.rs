//! Elements of `Ext^1(M, N)` as explicit extensions `0 → N → E → M → 0`.

use std::sync::Arc;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::homological::{ext_from, minimal_resolution, FreeResolution, Homology};
use crate::linalg::ResidueMatrix;
use crate::module::{FiniteModule, ModuleMap};

pub struct ExtensionClass {
    /// Coordinates in `Ext^1(M, N)`.
    pub class: Vec<u64>,
    /// Images in `N` of the generators of the first syzygy.
    pub cocycle: Vec<u64>,
    pub middle: Arc<FiniteModule>,
    /// `N → E`
    pub inclusion: ModuleMap,
    /// `E → M`
    pub projection: ModuleMap,
}

pub struct ExtClasses {
    pub m: Arc<FiniteModule>,
    pub n: Arc<FiniteModule>,
    pub resolution: FreeResolution,
    pub ext: Homology,
}

pub fn ext1_classes(m: &Arc<FiniteModule>, n: &Arc<FiniteModule>, caps: &Caps) -> Result<ExtClasses> {
    let resolution = minimal_resolution(m, 2, caps)?;
    let ext = ext_from(&resolution, n, 1)?;
    Ok(ExtClasses { m: m.clone(), n: n.clone(), resolution, ext })
}

impl ExtClasses {
    pub fn count(&self) -> u128 {
        self.ext.order()
    }

    /// Pushout of `0 → Ω → R^{t_0} → M → 0` along the cocycle of `class`:
    /// `E = (N ⊕ R^{t_0}) / {(φ(k), −k)}`.
    pub fn class(&self, class: &[u64], caps: &Caps) -> Result<ExtensionClass> {
        let ring = self.m.ring();
        let k = ring.rank();
        let modulus = ring.characteristic();
        let cocycle = self.ext.representative(class);
        let t0 = self.resolution.ranks[0];
        let d1 = self.resolution.differentials[0].to_free_rows(ring);
        let nd = self.n.dim();
        let free = FiniteModule::free(ring, t0);
        let sum = self.n.direct_sum(&free)?;
        let mut rows = ResidueMatrix::zeros(modulus, 0, nd + t0 * k);
        for i in 0..d1.rows() {
            let mut v: Vec<u64> = cocycle[i * nd..(i + 1) * nd].to_vec();
            v.extend(d1.row(i).iter().map(|&x| (modulus - x) % modulus));
            rows.push_row(&v);
        }
        let (proj, lift) = sum.sum.quotient_with_lift(&rows)?;
        let middle = proj.target().clone();
        let inclusion = sum.inclusions[0].then(&proj)?;
        let cover = &self.m.presentation(caps)?.cover;
        let to_m = ResidueMatrix::zeros(modulus, nd, self.m.dim()).vstack(cover)?;
        let projection = ModuleMap::new_unchecked(&middle, &self.m, lift.mul(&to_m)?);
        Ok(ExtensionClass { class: class.to_vec(), cocycle, middle, inclusion, projection })
    }

    /// Every class, provided their number is within the cap.
    pub fn iter<'a>(&'a self, caps: &'a Caps) -> Result<impl Iterator<Item = Result<ExtensionClass>> + 'a> {
        let total = self.count();
        if total > caps.ext_classes {
            return Err(Error::CapExceeded { what: "Ext^1 classes".into(), needed: total, cap: caps.ext_classes });
        }
        Ok(self.ext.module.elements(caps.ext_classes)?.map(move |h| self.class(&h, caps)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::RingMatrix;
    use crate::ring::ring_from_modulus;

    #[test]
    fn extensions_of_z2_by_z2_over_z4() {
        let r = Arc::new(ring_from_modulus(4).unwrap());
        let caps = Caps::default();
        let k = FiniteModule::cokernel_of_matrix(&r, &RingMatrix::new(1, 1, vec![vec![2]]).unwrap()).unwrap();
        let classes = ext1_classes(&k, &k, &caps).unwrap();
        assert_eq!(classes.count(), 2);
        let mut cyclic_middles = 0;
        for c in classes.iter(&caps).unwrap() {
            let c = c.unwrap();
            assert_eq!(c.middle.order(), 4);
            assert!(c.inclusion.is_injective().unwrap());
            assert!(c.projection.is_surjective().unwrap());
            assert!(c.inclusion.then(&c.projection).unwrap().is_zero());
            if c.middle.num_generators(&caps).unwrap() == 1 {
                cyclic_middles += 1;
            }
        }
        assert_eq!(cyclic_middles, 1);
    }
}
