//! Strongly Gorenstein projective, injective and flat modules, and
//! certificates of Gorenstein projectivity by periodic complete resolutions.
//!
//! A finitely generated `M` is SG-projective iff `Ext^1(M, R) = 0` and some
//! class of `Ext^1(M, M)` has a projective middle term; every such sequence
//! is a class, so exhausting the classes is a disproof. The flat variant
//! tests `Tor_1(M, R*)` and flat middle terms instead, and shares no
//! decision code with the projective one.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::certificate::{clamp, Certificate, Disproof, Flavor, GWitness, SgWitness, SummandWitness, Witness};
use crate::complex::{verify_complete_projective, PeriodicComplex};
use crate::error::{Error, Result};
use crate::extension::ext1_classes;
use crate::functor::{dual, hom};
use crate::homological::{ext, minimal_resolution, tor};
use crate::linalg::ResidueMatrix;
use crate::module::{power_map_between, FiniteModule, ModuleMap};
use crate::properties::{flat_by_tor, is_isomorphic, is_projective, projective_by_count, wrap_dual, Iso};

/// A live short exact sequence `0 → M → P → M → 0`.
#[derive(Clone, Debug)]
pub struct SelfExtension {
    pub module: Arc<FiniteModule>,
    pub middle: Arc<FiniteModule>,
    pub inclusion: ModuleMap,
    pub projection: ModuleMap,
}

impl SelfExtension {
    /// The period-1 complex `P --ι∘π--> P`.
    pub fn complex(&self) -> Result<PeriodicComplex> {
        let d = self.projection.then(&self.inclusion)?;
        PeriodicComplex::new(vec![self.middle.clone()], vec![d])
    }

    fn witness(&self, flavor: Flavor, middle_witness: Witness) -> SgWitness {
        SgWitness {
            ring: self.module.ring().to_data(),
            module: self.module.to_data(),
            flavor,
            middle: self.middle.to_data(),
            inclusion: self.inclusion.matrix().clone(),
            projection: self.projection.matrix().clone(),
            middle_witness: Box::new(middle_witness),
        }
    }
}

/// `P ⊕ P` with `(x, y) ↦ (0, x)`, whose kernel and image are `0 ⊕ P`.
pub fn shift_sequence(p: &Arc<FiniteModule>) -> Result<SelfExtension> {
    let s = p.direct_sum(p)?;
    Ok(SelfExtension {
        module: p.clone(),
        middle: s.sum.clone(),
        inclusion: s.inclusions[1].clone(),
        projection: s.projections[0].clone(),
    })
}

pub fn build_sg_witness_for_projective(p: &Arc<FiniteModule>, caps: &Caps) -> Result<SgWitness> {
    if !is_projective(p, caps)?.is_yes() {
        return Err(Error::NotProjective);
    }
    let seq = shift_sequence(p)?;
    let middle = is_projective(&seq.middle, caps)?;
    let w = middle.witness.ok_or_else(|| Error::Internal("P ⊕ P is not projective".into()))?;
    Ok(seq.witness(Flavor::Projective, w))
}

fn with_caps(result: Result<Certificate>) -> Result<Certificate> {
    result.or_else(Certificate::from_cap)
}

pub fn is_sg_projective(m: &Arc<FiniteModule>, caps: &Caps) -> Result<Certificate> {
    with_caps(sg_projective_search(m, caps))
}

fn sg_projective_search(m: &Arc<FiniteModule>, caps: &Caps) -> Result<Certificate> {
    if projective_by_count(m, caps)? {
        return Ok(Certificate::yes(Witness::SelfExtension(build_sg_witness_for_projective(m, caps)?)));
    }
    let r = FiniteModule::regular(m.ring());
    let e = ext(m, &r, 1, caps)?.order();
    if e != 1 {
        return Ok(Certificate::no(Disproof::NonvanishingExt { degree: 1, order: clamp(e) }));
    }
    let classes = ext1_classes(m, m, caps)?;
    for class in classes.iter(caps)? {
        let class = class?;
        if !projective_by_count(&class.middle, caps)? {
            continue;
        }
        let cert = is_projective(&class.middle, caps)?;
        let w = cert
            .witness
            .ok_or_else(|| Error::Internal("projective middle term without a section".into()))?;
        let seq = SelfExtension {
            module: m.clone(),
            middle: class.middle.clone(),
            inclusion: class.inclusion,
            projection: class.projection,
        };
        return Ok(Certificate::yes(Witness::SelfExtension(seq.witness(Flavor::Projective, w))));
    }
    Ok(Certificate::no(Disproof::ExhaustedClasses { classes: clamp(classes.count()) }))
}

pub fn is_sg_flat(m: &Arc<FiniteModule>, caps: &Caps) -> Result<Certificate> {
    with_caps(sg_flat_search(m, caps))
}

fn sg_flat_search(m: &Arc<FiniteModule>, caps: &Caps) -> Result<Certificate> {
    let flat_witness = |x: &Arc<FiniteModule>| Witness::TorFlat { ring: x.ring().to_data(), module: x.to_data() };
    if flat_by_tor(m, caps)? {
        let seq = shift_sequence(m)?;
        let w = flat_witness(&seq.middle);
        return Ok(Certificate::yes(Witness::SelfExtension(seq.witness(Flavor::Flat, w))));
    }
    let rstar = dual(&FiniteModule::regular(m.ring()))?.module;
    let t = tor(m, &rstar, 1, caps)?.order();
    if t != 1 {
        return Ok(Certificate::no(Disproof::NonvanishingTor { degree: 1, order: clamp(t) }));
    }
    let classes = ext1_classes(m, m, caps)?;
    for class in classes.iter(caps)? {
        let class = class?;
        if flat_by_tor(&class.middle, caps)? {
            let w = flat_witness(&class.middle);
            let seq = SelfExtension {
                module: m.clone(),
                middle: class.middle,
                inclusion: class.inclusion,
                projection: class.projection,
            };
            return Ok(Certificate::yes(Witness::SelfExtension(seq.witness(Flavor::Flat, w))));
        }
    }
    Ok(Certificate::no(Disproof::ExhaustedClasses { classes: clamp(classes.count()) }))
}

/// SG-injective iff the Matlis dual is SG-projective.
pub fn is_sg_injective(m: &Arc<FiniteModule>, caps: &Caps) -> Result<Certificate> {
    let d = dual(m)?;
    let inner = is_sg_projective(&d.module, caps)?;
    Ok(wrap_dual(m, &d.module, inner))
}

/// Direct search for `0 → M → I → M → 0` with `I` injective and
/// `Ext^1(R*, M) = 0`; used to cross-check [`is_sg_injective`].
pub fn is_sg_injective_direct(m: &Arc<FiniteModule>, caps: &Caps) -> Result<Certificate> {
    with_caps(sg_injective_search(m, caps))
}

fn injective_by_count(x: &Arc<FiniteModule>, caps: &Caps) -> Result<bool> {
    projective_by_count(&dual(x)?.module, caps)
}

fn sg_injective_search(m: &Arc<FiniteModule>, caps: &Caps) -> Result<Certificate> {
    let rstar = dual(&FiniteModule::regular(m.ring()))?.module;
    let e = ext(&rstar, m, 1, caps)?.order();
    if e != 1 {
        return Ok(Certificate::no(Disproof::NonvanishingExt { degree: 1, order: clamp(e) }));
    }
    if injective_by_count(m, caps)? {
        return Ok(Certificate::yes_plain());
    }
    let classes = ext1_classes(m, m, caps)?;
    for class in classes.iter(caps)? {
        if injective_by_count(&class?.middle, caps)? {
            return Ok(Certificate::yes_plain());
        }
    }
    Ok(Certificate::no(Disproof::ExhaustedClasses { classes: clamp(classes.count()) }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualityReport {
    pub tor_order: u64,
    pub ext_order: u64,
    pub orders_match: bool,
    pub covanish: bool,
}

/// `|Tor_1(M, R*)|` against `|Ext^1(M, R)|`.
pub fn duality_check(m: &Arc<FiniteModule>, caps: &Caps) -> Result<DualityReport> {
    let r = FiniteModule::regular(m.ring());
    let rstar = dual(&r)?.module;
    let t = tor(m, &rstar, 1, caps)?.order();
    let e = ext(m, &r, 1, caps)?.order();
    Ok(DualityReport {
        tor_order: clamp(t),
        ext_order: clamp(e),
        orders_match: t == e,
        covanish: (t == 1) == (e == 1),
    })
}

/// A periodic complete resolution together with `M ≅ Im(d_0)`.
#[derive(Clone, Debug)]
pub struct CompleteResolution {
    pub module: Arc<FiniteModule>,
    pub complex: PeriodicComplex,
    /// Injective `M → P_{p-1}` with image `Im(d_0)`.
    pub embedding: ModuleMap,
}

impl CompleteResolution {
    pub fn to_witness(&self) -> GWitness {
        GWitness {
            ring: self.module.ring().to_data(),
            module: self.module.to_data(),
            complex: self.complex.to_data(),
            embedding: self.embedding.matrix().clone(),
        }
    }
}

/// `0 → Ω^c → F_{c-1} → Ω^{c-1} → 0`
struct LadderStep {
    inc: ModuleMap,
    proj: ModuleMap,
}

struct Ladder {
    omega: BTreeMap<i64, Arc<FiniteModule>>,
    steps: BTreeMap<i64, LadderStep>,
}

impl Ladder {
    fn build(m: &Arc<FiniteModule>, positive: usize, negative: usize, caps: &Caps) -> Result<Self> {
        let ring = m.ring();
        let r = FiniteModule::regular(ring);
        let mut omega = BTreeMap::new();
        let mut steps = BTreeMap::new();
        omega.insert(0, m.clone());
        if positive > 0 {
            let res = minimal_resolution(m, positive, caps)?;
            let cover = &m.presentation(caps)?.cover;
            for c in 1..=positive {
                let inc = res.syzygies[c - 1].clone();
                let free = FiniteModule::free(ring, res.ranks[c - 1]);
                let proj = if c == 1 {
                    ModuleMap::new_unchecked(&free, m, cover.clone())
                } else {
                    let lower = FiniteModule::free(ring, res.ranks[c - 2]);
                    power_map_between(&r, &res.differentials[c - 2], &free, &lower)
                        .factor_through(&res.syzygies[c - 2])?
                };
                omega.insert(c as i64, inc.source().clone());
                steps.insert(c as i64, LadderStep { inc, proj });
            }
        }
        // cosyzygies: X ↪ R^s through minimal generators of Hom(X, R)
        let mut c = 0i64;
        while (-c as usize) < negative {
            let x = omega[&c].clone();
            let h = hom(&x, &r, caps)?;
            let gens = &h.module.generators(caps)?.rows;
            let mut mat = ResidueMatrix::zeros(x.modulus(), x.dim(), 0);
            for g in gens.row_iter() {
                mat = mat.hstack(h.to_map(g).matrix())?;
            }
            let free = FiniteModule::free(ring, gens.rows());
            let inc = ModuleMap::new_unchecked(&x, &free, mat);
            if !inc.is_injective()? {
                break;
            }
            let proj = inc.cokernel()?;
            omega.insert(c - 1, proj.target().clone());
            steps.insert(c, LadderStep { inc, proj });
            c -= 1;
        }
        Ok(Self { omega, steps })
    }

    /// Splices `F_a … F_{b-1}` and closes the loop with `Ω^a ≅ Ω^b`.
    fn splice(&self, a: i64, b: i64, iso: &ModuleMap) -> Result<CompleteResolution> {
        let p = (b - a) as usize;
        let slot = |j: i64| j.rem_euclid(p as i64) as usize;
        let mut terms = vec![None; p];
        let mut diffs = vec![None; p];
        for j in a..b {
            let out = &self.steps[&(j + 1)].proj;
            terms[slot(j)] = Some(out.source().clone());
            let d = if j > a {
                out.then(&self.steps[&j].inc)?
            } else {
                out.then(iso)?.then(&self.steps[&b].inc)?
            };
            diffs[slot(j)] = Some(d);
        }
        let embedding = if a < 0 { self.steps[&0].inc.clone() } else { iso.then(&self.steps[&b].inc)? };
        let complex = PeriodicComplex::new(
            terms.into_iter().map(|t| t.expect("filled")).collect(),
            diffs.into_iter().map(|d| d.expect("filled")).collect(),
        )?;
        Ok(CompleteResolution { module: self.omega[&0].clone(), complex, embedding })
    }
}

/// Searches for a periodic complete resolution through `M`.
///
/// Projective modules get the period-1 shift complex. Otherwise syzygies
/// `Ω^i` (and, over quasi-Frobenius rings, cosyzygies) are compared for
/// `Ω^a ≅ Ω^b` with `a ≤ 0 < b` and `b − a ≤ caps.period`. Never answers No.
pub fn certify_g_projective(
    m: &Arc<FiniteModule>,
    caps: &Caps,
) -> Result<(Certificate, Option<CompleteResolution>)> {
    match g_projective_search(m, caps) {
        Ok(Some(cr)) => Ok((Certificate::yes(Witness::Periodic(cr.to_witness())), Some(cr))),
        Ok(None) => Ok((Certificate::unknown("no periodic complete resolution within the period and depth caps"), None)),
        Err(e) => Ok((Certificate::from_cap(e)?, None)),
    }
}

fn g_projective_search(m: &Arc<FiniteModule>, caps: &Caps) -> Result<Option<CompleteResolution>> {
    let accept = |cr: CompleteResolution| -> Result<Option<CompleteResolution>> {
        Ok(verify_complete_projective(&cr.complex, caps)?.is_yes().then_some(cr))
    };
    if projective_by_count(m, caps)? {
        let seq = shift_sequence(m)?;
        let cr = CompleteResolution { module: m.clone(), complex: seq.complex()?, embedding: seq.inclusion.clone() };
        return accept(cr);
    }
    let period = caps.period.max(1);
    let positive = period.min(caps.depth);
    let negative = if m.ring().is_quasi_frobenius(caps)? { (period - 1).min(caps.depth) } else { 0 };
    let ladder = Ladder::build(m, positive, negative, caps)?;
    for p in 1..=period as i64 {
        for a in (-(p - 1)..=0).rev() {
            let b = a + p;
            let (Some(x), Some(y)) = (ladder.omega.get(&a), ladder.omega.get(&b)) else {
                continue;
            };
            if !ladder.steps.contains_key(&b) || !ladder.steps.contains_key(&(a + 1)) {
                continue;
            }
            if let Iso::Yes(iso) = is_isomorphic(x, y, caps)? {
                if let Some(cr) = accept(ladder.splice(a, b, &iso)?)? {
                    return Ok(Some(cr));
                }
            }
        }
    }
    Ok(None)
}

/// The summand construction behind "G-projective = summand of SG-projective".
pub struct Summand {
    pub module: Arc<FiniteModule>,
    /// `N = ⊕ Im(d_i)`
    pub summand_of: Arc<FiniteModule>,
    pub sequence: SelfExtension,
    pub injection: ModuleMap,
    pub retraction: ModuleMap,
}

impl Summand {
    pub fn to_witness(&self, caps: &Caps) -> Result<SummandWitness> {
        let middle = is_projective(&self.sequence.middle, caps)?
            .witness
            .ok_or_else(|| Error::Internal("⊕P_i is not projective".into()))?;
        Ok(SummandWitness {
            ring: self.module.ring().to_data(),
            module: self.module.to_data(),
            summand_of: self.summand_of.to_data(),
            sg: self.sequence.witness(Flavor::Projective, middle),
            injection: self.injection.matrix().clone(),
            retraction: self.retraction.matrix().clone(),
        })
    }
}

/// `Q = ⊕ P_i` with `D = ⊕ d_i` is a period-1 complete resolution of
/// `N = Im(D) = ⊕ Im(d_i)`, and `M = Im(d_0)` is a split summand of `N`.
pub fn summand_witness_from_periodic(cr: &CompleteResolution, caps: &Caps) -> Result<Summand> {
    let c = &cr.complex;
    if !verify_complete_projective(c, caps)?.is_yes() {
        return Err(Error::NotComplete("input complex fails verification".into()));
    }
    let ring = cr.module.ring();
    let p = c.period();
    let (q, offsets) = FiniteModule::direct_sum_all(ring, &c.terms)?;
    let mut dmat = ResidueMatrix::zeros(q.modulus(), q.dim(), q.dim());
    for (i, d) in c.differentials.iter().enumerate() {
        dmat.put_block(offsets[i], offsets[(i + p - 1) % p], d.matrix());
    }
    let big_d = ModuleMap::new_unchecked(&q, &q, dmat);
    let n_embed = big_d.image()?;
    let n = n_embed.source().clone();
    let onto_n = big_d.factor_through(&n_embed)?;
    let last = p - 1;
    let block = &c.terms[last];
    let mut into_q = ResidueMatrix::zeros(q.modulus(), block.dim(), q.dim());
    into_q.put_block(0, offsets[last], &ResidueMatrix::identity(q.modulus(), block.dim()));
    let block_in = ModuleMap::new_unchecked(block, &q, into_q.clone());
    let block_out = ModuleMap::new_unchecked(&q, block, into_q.transpose());
    let injection = cr.embedding.then(&block_in)?.factor_through(&n_embed)?;
    let retraction = n_embed.then(&block_out)?.factor_through(&cr.embedding)?;
    if !injection.then(&retraction)?.equals(&ModuleMap::identity(&cr.module))? {
        return Err(Error::Internal("retraction ∘ injection ≠ id".into()));
    }
    Ok(Summand {
        module: cr.module.clone(),
        summand_of: n.clone(),
        sequence: SelfExtension { module: n, middle: q, inclusion: n_embed, projection: onto_n },
        injection,
        retraction,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub projective: Certificate,
    pub injective: Certificate,
    pub flat: Certificate,
    pub free: Certificate,
    pub sg_projective: Certificate,
    pub sg_injective: Certificate,
    pub sg_flat: Certificate,
    pub g_projective_certified: Certificate,
}

impl Classification {
    pub fn entries(&self) -> [(&'static str, &Certificate); 8] {
        [
            ("projective", &self.projective),
            ("injective", &self.injective),
            ("flat", &self.flat),
            ("free", &self.free),
            ("sg_projective", &self.sg_projective),
            ("sg_injective", &self.sg_injective),
            ("sg_flat", &self.sg_flat),
            ("g_projective_certified", &self.g_projective_certified),
        ]
    }

    pub fn caps_hit(&self) -> Vec<String> {
        let mut out: Vec<String> = self.entries().iter().filter_map(|(_, c)| c.cap.clone()).collect();
        out.sort();
        out.dedup();
        out
    }

    /// The implications every verdict set must satisfy.
    pub fn check_consistency(&self) -> Result<()> {
        let implies = |a: &Certificate, b: &Certificate, what: &str| {
            if a.is_yes() && !b.is_yes() {
                Err(Error::Internal(format!("{what} violated")))
            } else {
                Ok(())
            }
        };
        implies(&self.projective, &self.sg_projective, "projective ⇒ SG-projective")?;
        implies(&self.flat, &self.sg_flat, "flat ⇒ SG-flat")?;
        implies(&self.injective, &self.sg_injective, "injective ⇒ SG-injective")?;
        implies(&self.free, &self.projective, "free ⇒ projective")?;
        if self.sg_projective.is_yes() && self.g_projective_certified.is_no() {
            return Err(Error::Internal("SG-projective module refuted as G-projective".into()));
        }
        if !self.projective.is_unknown() && !self.flat.is_unknown() && self.projective.status != self.flat.status {
            return Err(Error::Internal("projective and flat verdicts differ".into()));
        }
        Ok(())
    }
}

pub fn classify(m: &Arc<FiniteModule>, caps: &Caps) -> Result<Classification> {
    let cls = Classification {
        projective: is_projective(m, caps)?,
        injective: crate::properties::is_injective(m, caps)?,
        flat: crate::properties::is_flat(m, caps)?,
        free: crate::properties::is_free(m, caps)?,
        sg_projective: is_sg_projective(m, caps)?,
        sg_injective: is_sg_injective(m, caps)?,
        sg_flat: is_sg_flat(m, caps)?,
        g_projective_certified: certify_g_projective(m, caps)?.0,
    };
    cls.check_consistency()?;
    Ok(cls)
}
