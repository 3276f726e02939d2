//! Finite commutative rings given by structure constants over Z/m.
//!
//! A ring of characteristic `m` and rank `k` has additive group `(Z/m)^k`
//! with basis `b_0..b_{k-1}`; `table[i][j]` holds the coordinates of `b_i·b_j`.
//! Elements are coordinate vectors. Local data (primitive idempotents,
//! nilradical, socle) is found by enumerating all `m^k` elements, so it is
//! only available below the element cap.

use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::groebner::GroebnerBasis;
use crate::linalg::{check_modulus, gcd, Howell, ResidueMatrix};

/// Ring element: coordinates on the ring basis.
pub type Element = Vec<u64>;

/// How a ring was constructed; used for parsing and printing elements.
#[derive(Clone, Debug)]
pub enum RingSource {
    Modulus(u64),
    Quotient(GroebnerBasis),
    Product(Arc<FiniteRing>, Arc<FiniteRing>),
    /// A local factor `e·R` of a decomposition.
    Factor,
    /// Rebuilt from serialized structure constants.
    Raw,
}

/// Serializable structure constants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingData {
    pub characteristic: u64,
    pub labels: Vec<String>,
    pub table: Vec<Vec<Vec<u64>>>,
    pub identity: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct LocalFactor {
    pub idempotent: Element,
    /// `|e·R|`
    pub order: u128,
    /// `|e·J|`
    pub radical_order: u128,
    /// `|e·R / e·J|`
    pub residue_field_size: u128,
    /// `|e·soc(R)|`
    pub socle_order: u128,
}

#[derive(Clone, Debug)]
pub struct LocalStructure {
    pub factors: Vec<LocalFactor>,
    /// Howell basis of the nilradical (= Jacobson radical) as an additive group.
    pub radical: Howell,
    /// Howell basis of `ann(J)`.
    pub socle: Howell,
}

pub struct FiniteRing {
    characteristic: u64,
    labels: Vec<String>,
    table: Vec<Vec<Element>>,
    identity: Element,
    named: Vec<(String, Element)>,
    source: RingSource,
    /// `mult[i]` is right multiplication by `b_i`: row `l` holds `b_l·b_i`.
    mult: Vec<ResidueMatrix>,
    local: OnceLock<LocalStructure>,
}

impl fmt::Debug for FiniteRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteRing({})", self.describe())
    }
}

impl PartialEq for FiniteRing {
    fn eq(&self, other: &Self) -> bool {
        self.characteristic == other.characteristic
            && self.table == other.table
            && self.identity == other.identity
    }
}

impl Eq for FiniteRing {}

impl FiniteRing {
    /// Validates and builds a ring from structure constants.
    pub fn from_table(
        characteristic: u64,
        labels: Vec<String>,
        table: Vec<Vec<Element>>,
        identity: Element,
        named: Vec<(String, Element)>,
        source: RingSource,
    ) -> Result<Self> {
        check_modulus(characteristic)?;
        let m = characteristic;
        let k = labels.len();
        if k == 0 {
            return Err(Error::InvalidRing("rank 0".into()));
        }
        if table.len() != k || table.iter().any(|r| r.len() != k || r.iter().any(|c| c.len() != k)) {
            return Err(Error::InvalidRing("structure constants are not k×k×k".into()));
        }
        if identity.len() != k {
            return Err(Error::InvalidRing("identity has wrong length".into()));
        }
        let reduced = |v: &[u64]| v.iter().all(|&x| x < m);
        if !reduced(&identity) || table.iter().flatten().any(|c| !reduced(c)) {
            return Err(Error::InvalidRing("entries not reduced modulo the characteristic".into()));
        }
        let mult = (0..k)
            .map(|i| {
                let rows: Vec<&Element> = (0..k).map(|l| &table[l][i]).collect();
                ResidueMatrix::from_rows(m, k, &rows).expect("validated shape")
            })
            .collect();
        let ring = Self {
            characteristic: m,
            labels,
            table,
            identity,
            named,
            source,
            mult,
            local: OnceLock::new(),
        };
        ring.check_axioms()?;
        Ok(ring)
    }

    fn check_axioms(&self) -> Result<()> {
        let k = self.rank();
        for i in 0..k {
            for j in 0..k {
                if self.table[i][j] != self.table[j][i] {
                    return Err(Error::InvalidRing(format!("b{i}·b{j} ≠ b{j}·b{i}")));
                }
            }
            if self.mul(&self.identity, &self.basis_element(i)) != self.basis_element(i) {
                return Err(Error::InvalidRing(format!("identity does not fix b{i}")));
            }
        }
        for i in 0..k {
            for j in 0..k {
                let ij = &self.table[i][j];
                for l in 0..k {
                    let left = self.mul(ij, &self.basis_element(l));
                    let right = self.mul(&self.basis_element(i), &self.table[j][l]);
                    if left != right {
                        return Err(Error::InvalidRing(format!("(b{i}b{j})b{l} ≠ b{i}(b{j}b{l})")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn from_data(data: &RingData) -> Result<Self> {
        Self::from_table(
            data.characteristic,
            data.labels.clone(),
            data.table.clone(),
            data.identity.clone(),
            Vec::new(),
            RingSource::Raw,
        )
    }

    pub fn to_data(&self) -> RingData {
        RingData {
            characteristic: self.characteristic,
            labels: self.labels.clone(),
            table: self.table.clone(),
            identity: self.identity.clone(),
        }
    }

    pub fn characteristic(&self) -> u64 {
        self.characteristic
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn source(&self) -> &RingSource {
        &self.source
    }

    pub fn named_elements(&self) -> &[(String, Element)] {
        &self.named
    }

    pub fn named(&self, name: &str) -> Option<&Element> {
        self.named.iter().find(|(n, _)| n == name).map(|(_, e)| e)
    }

    /// `|R| = m^k`, saturating.
    pub fn order(&self) -> u128 {
        (self.characteristic as u128).saturating_pow(self.rank() as u32)
    }

    pub fn table(&self) -> &[Vec<Element>] {
        &self.table
    }

    pub fn one(&self) -> Element {
        self.identity.clone()
    }

    pub fn zero(&self) -> Element {
        vec![0; self.rank()]
    }

    pub fn basis_element(&self, i: usize) -> Element {
        let mut e = self.zero();
        e[i] = 1;
        e
    }

    pub fn from_integer(&self, n: i64) -> Element {
        let c = n.rem_euclid(self.characteristic as i64) as u64;
        self.identity.iter().map(|&x| x * c % self.characteristic).collect()
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Element {
        let m = self.characteristic;
        a.iter().zip(b).map(|(x, y)| (x + y) % m).collect()
    }

    pub fn neg(&self, a: &[u64]) -> Element {
        let m = self.characteristic;
        a.iter().map(|x| (m - x % m) % m).collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> Element {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Element {
        let m = self.characteristic;
        let k = self.rank();
        let mut out = vec![0u64; k];
        for i in 0..k {
            if a[i] == 0 {
                continue;
            }
            for j in 0..k {
                let c = a[i] * b[j] % m;
                if c == 0 {
                    continue;
                }
                for (o, &t) in out.iter_mut().zip(&self.table[i][j]) {
                    *o = (*o + c * t) % m;
                }
            }
        }
        out
    }

    pub fn pow(&self, a: &[u64], mut e: u64) -> Element {
        let mut base = a.to_vec();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Matrix of right multiplication by `a`: row `l` is `b_l·a`.
    pub fn mult_matrix(&self, a: &[u64]) -> ResidueMatrix {
        let k = self.rank();
        let mut out = ResidueMatrix::zeros(self.characteristic, k, k);
        for (i, &c) in a.iter().enumerate() {
            if c != 0 {
                out.add_scaled(c, &self.mult[i]);
            }
        }
        out
    }

    pub fn basis_mult(&self) -> &[ResidueMatrix] {
        &self.mult
    }

    pub fn is_zero_element(&self, a: &[u64]) -> bool {
        a.iter().all(|&x| x == 0)
    }

    /// All `m^k` elements, provided that count is within the cap.
    pub fn elements(&self, caps: &Caps) -> Result<impl Iterator<Item = Element> + '_> {
        let total = self.order();
        if total > caps.ring_elements {
            return Err(Error::CapExceeded {
                what: format!("enumerating {}", self.describe()),
                needed: total,
                cap: caps.ring_elements,
            });
        }
        let m = self.characteristic;
        let k = self.rank();
        Ok((0..total).map(move |mut n| {
            let mut v = vec![0u64; k];
            for x in v.iter_mut() {
                *x = (n % m as u128) as u64;
                n /= m as u128;
            }
            v
        }))
    }

    /// Human-readable element, in the syntax accepted by the DSL.
    pub fn format_element(&self, a: &[u64]) -> String {
        if let RingSource::Product(r, s) = &self.source {
            let (x, y) = a.split_at(r.rank());
            return format!("<{}, {}>", r.format_element(x), s.format_element(y));
        }
        let mut parts = Vec::new();
        for (i, &c) in a.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let label = &self.labels[i];
            parts.push(match (c, label.as_str()) {
                (c, "1") => c.to_string(),
                (1, l) => l.to_string(),
                (c, l) => format!("{c}*{l}"),
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    pub fn describe(&self) -> String {
        match &self.source {
            RingSource::Modulus(n) => format!("Z/{n}"),
            RingSource::Quotient(gb) => gb.describe(),
            RingSource::Product(r, s) => format!("({}) * ({})", r.describe(), s.describe()),
            RingSource::Factor | RingSource::Raw => {
                format!("ring of characteristic {} and rank {}", self.characteristic, self.rank())
            }
        }
    }

    fn length_bound(&self) -> u64 {
        // composition length of R as a Z-module bounds every nilpotency index
        let mut m = self.characteristic;
        let mut primes = 0u64;
        let mut d = 2;
        while d * d <= m {
            while m % d == 0 {
                primes += 1;
                m /= d;
            }
            d += 1;
        }
        if m > 1 {
            primes += 1;
        }
        primes * self.rank() as u64
    }

    pub fn is_nilpotent(&self, a: &[u64]) -> bool {
        let mut x = a.to_vec();
        let mut reach = 1u64;
        while reach < self.length_bound().max(1) {
            x = self.mul(&x, &x);
            reach *= 2;
        }
        self.is_zero_element(&x)
    }

    /// Primitive idempotents, radical and socle; computed once by enumeration.
    pub fn local_structure(&self, caps: &Caps) -> Result<&LocalStructure> {
        if let Some(ls) = self.local.get() {
            return Ok(ls);
        }
        let ls = self.compute_local(caps)?;
        let _ = self.local.set(ls);
        Ok(self.local.get().expect("just set"))
    }

    fn compute_local(&self, caps: &Caps) -> Result<LocalStructure> {
        let m = self.characteristic;
        let k = self.rank();
        let mut idempotents = Vec::new();
        let mut nil_rows: Vec<Element> = Vec::new();
        let mut nil_span = ResidueMatrix::zeros(m, 0, k).howell();
        for a in self.elements(caps)? {
            if self.mul(&a, &a) == a && !self.is_zero_element(&a) {
                idempotents.push(a.clone());
            }
            if !nil_span.contains(&a) && self.is_nilpotent(&a) {
                nil_rows.push(a);
                nil_span = ResidueMatrix::from_rows(m, k, &nil_rows)?.howell();
            }
        }
        let primitive: Vec<Element> = idempotents
            .iter()
            .filter(|e| {
                !idempotents
                    .iter()
                    .any(|f| f != *e && self.mul(f, e) == *f)
            })
            .cloned()
            .collect();
        let radical = nil_span;
        let socle = self.annihilator(radical.basis())?;
        let mut factors = Vec::with_capacity(primitive.len());
        for e in primitive {
            let me = self.mult_matrix(&e);
            let order = me.row_span_order();
            let radical_order = radical.basis().mul(&me)?.row_span_order();
            let socle_order = socle.basis().mul(&me)?.row_span_order();
            factors.push(LocalFactor {
                idempotent: e,
                order,
                radical_order,
                residue_field_size: order / radical_order,
                socle_order,
            });
        }
        let total: u128 = factors.iter().map(|f| f.order).product();
        if total != self.order() {
            return Err(Error::Internal(format!(
                "local factors multiply to {total}, ring has {}",
                self.order()
            )));
        }
        Ok(LocalStructure { factors, radical, socle })
    }

    /// `{r : r·x = 0 for every row x}` as a Howell basis.
    pub fn annihilator(&self, gens: &ResidueMatrix) -> Result<Howell> {
        let m = self.characteristic;
        let k = self.rank();
        if gens.rows() == 0 {
            return Ok(ResidueMatrix::identity(m, k).howell());
        }
        let mut big = self.mult_matrix(gens.row(0));
        for r in 1..gens.rows() {
            big = big.hstack(&self.mult_matrix(gens.row(r)))?;
        }
        Ok(big.kernel().howell())
    }

    /// Additive generators of the nilradical.
    pub fn nilradical(&self, caps: &Caps) -> Result<Vec<Element>> {
        Ok(self.local_structure(caps)?.radical.basis().to_rows())
    }

    /// Additive generators of `ann(J)`.
    pub fn socle(&self, caps: &Caps) -> Result<Vec<Element>> {
        Ok(self.local_structure(caps)?.socle.basis().to_rows())
    }

    pub fn is_local(&self, caps: &Caps) -> Result<bool> {
        Ok(self.local_structure(caps)?.factors.len() == 1)
    }

    /// Every local factor has a simple socle.
    pub fn is_quasi_frobenius(&self, caps: &Caps) -> Result<bool> {
        Ok(self
            .local_structure(caps)?
            .factors
            .iter()
            .all(|f| f.socle_order == f.residue_field_size))
    }

    pub fn decompose_local(self: &Arc<Self>, caps: &Caps) -> Result<RingDecomposition> {
        let ls = self.local_structure(caps)?;
        let mut factors = Vec::with_capacity(ls.factors.len());
        for (idx, f) in ls.factors.iter().enumerate() {
            let (ring, projection) = self.factor_ring(&f.idempotent, idx)?;
            factors.push(DecompositionFactor {
                ring: Arc::new(ring),
                idempotent: f.idempotent.clone(),
                projection,
            });
        }
        Ok(RingDecomposition { factors, complete: true })
    }

    /// Builds `e·R` as a ring over Z/(additive order of e).
    fn factor_ring(&self, e: &[u64], idx: usize) -> Result<(FiniteRing, ResidueMatrix)> {
        let m = self.characteristic;
        let k = self.rank();
        let me = e.iter().map(|&c| m / gcd(c, m)).fold(1u64, |a, b| a / gcd(a, b) * b);
        let shrink = m / me;
        // m_e-torsion of (Z/m)^k is identified with (Z/m_e)^k by dividing by m/m_e
        let to_local = |v: &[u64]| -> Vec<u64> { v.iter().map(|&x| (x / shrink) % me).collect() };
        let mult_e = self.mult_matrix(e);
        let target = mult_e.row_span_order();
        let mut chosen: Vec<Element> = Vec::new();
        let mut chosen_local: Vec<Vec<u64>> = Vec::new();
        let mut current = 1u128;
        for l in 0..k {
            if current == target {
                break;
            }
            let cand = mult_e.row(l).to_vec();
            let mut trial = chosen_local.clone();
            trial.push(to_local(&cand));
            let order = ResidueMatrix::from_rows(me.max(2), k, &trial)?.row_span_order();
            if me >= 2 && order == current * me as u128 {
                chosen.push(cand);
                chosen_local = trial;
                current = order;
            }
        }
        if current != target || me < 2 {
            return Err(Error::Internal("local factor is not free over its characteristic".into()));
        }
        let basis = ResidueMatrix::from_rows(me, k, &chosen_local)?;
        let coords = |v: &[u64]| -> Result<Vec<u64>> {
            basis
                .solve(&to_local(v))?
                .ok_or_else(|| Error::Internal("element outside e·R".into()))
        };
        let r = chosen.len();
        let mut table = vec![vec![Vec::new(); r]; r];
        for a in 0..r {
            for b in 0..r {
                table[a][b] = coords(&self.mul(&chosen[a], &chosen[b]))?;
            }
        }
        let identity = coords(e)?;
        let mut proj_rows = Vec::with_capacity(k);
        for l in 0..k {
            proj_rows.push(coords(mult_e.row(l))?);
        }
        let labels = (0..r).map(|a| format!("f{idx}_{a}")).collect();
        let ring = FiniteRing::from_table(me, labels, table, identity, Vec::new(), RingSource::Factor)?;
        let projection = ResidueMatrix::from_rows(me, r, &proj_rows)?;
        Ok((ring, projection))
    }
}

pub struct DecompositionFactor {
    pub ring: Arc<FiniteRing>,
    pub idempotent: Element,
    /// Row `l` holds the coordinates of `e·b_l` in the factor's basis
    /// (entries modulo the factor's characteristic).
    pub projection: ResidueMatrix,
}

pub struct RingDecomposition {
    pub factors: Vec<DecompositionFactor>,
    pub complete: bool,
}

pub fn ring_from_modulus(n: u64) -> Result<FiniteRing> {
    if n < 2 {
        return Err(Error::InvalidModulus(n));
    }
    FiniteRing::from_table(n, vec!["1".into()], vec![vec![vec![1 % n]]], vec![1], Vec::new(), RingSource::Modulus(n))
}

/// Componentwise product; both factors must share the characteristic.
pub fn ring_product(r: &Arc<FiniteRing>, s: &Arc<FiniteRing>) -> Result<FiniteRing> {
    if r.characteristic != s.characteristic {
        return Err(Error::CharacteristicMismatch(r.characteristic, s.characteristic));
    }
    let (kr, ks) = (r.rank(), s.rank());
    let k = kr + ks;
    let mut table = vec![vec![vec![0u64; k]; k]; k];
    for i in 0..kr {
        for j in 0..kr {
            table[i][j][..kr].copy_from_slice(&r.table[i][j]);
        }
    }
    for i in 0..ks {
        for j in 0..ks {
            table[kr + i][kr + j][kr..].copy_from_slice(&s.table[i][j]);
        }
    }
    let mut identity = r.identity.clone();
    identity.extend_from_slice(&s.identity);
    let labels = r
        .labels
        .iter()
        .map(|l| format!("{l}@1"))
        .chain(s.labels.iter().map(|l| format!("{l}@2")))
        .collect();
    FiniteRing::from_table(
        r.characteristic,
        labels,
        table,
        identity,
        Vec::new(),
        RingSource::Product(r.clone(), s.clone()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groebner::{buchberger, build_ring, Polynomial};

    fn quotient(p: u64, vars: &[&str], gens: &[&[(&[u32], i64)]]) -> FiniteRing {
        let v: Arc<Vec<String>> = Arc::new(vars.iter().map(|s| s.to_string()).collect());
        let polys: Vec<Polynomial> = gens
            .iter()
            .map(|g| Polynomial::from_terms(p, v.clone(), g.iter().map(|(e, c)| (e.to_vec(), *c))).unwrap())
            .collect();
        build_ring(&buchberger(&polys).unwrap()).unwrap()
    }

    #[test]
    fn modulus_rings() {
        let z4 = ring_from_modulus(4).unwrap();
        assert_eq!(z4.order(), 4);
        assert!(ring_from_modulus(1).is_err());
        assert_eq!(ring_from_modulus(2).unwrap().order(), 2);
    }

    #[test]
    fn products() {
        let f2 = Arc::new(ring_from_modulus(2).unwrap());
        let z4 = Arc::new(ring_from_modulus(4).unwrap());
        let caps = Caps::default();
        let p = ring_product(&f2, &f2).unwrap();
        assert_eq!(p.order(), 4);
        assert_eq!(p.local_structure(&caps).unwrap().factors.len(), 2);
        assert_eq!(ring_product(&z4, &z4).unwrap().order(), 16);
        assert_eq!(ring_product(&f2, &z4).unwrap_err(), Error::CharacteristicMismatch(2, 4));
    }

    #[test]
    fn radicals() {
        let caps = Caps::default();
        assert!(ring_from_modulus(2).unwrap().nilradical(&caps).unwrap().is_empty());
        assert_eq!(ring_from_modulus(4).unwrap().nilradical(&caps).unwrap(), vec![vec![2]]);
        let r = quotient(2, &["x", "y"], &[&[(&[2, 0], 1)], &[(&[0, 2], 1)]]);
        // basis 1, y, x, xy ordered by degrevlex; the radical is spanned by x, y, xy
        let j = r.local_structure(&caps).unwrap().radical.order();
        assert_eq!(j, 8);
    }

    #[test]
    fn z6_splits() {
        let caps = Caps::default();
        let z6 = Arc::new(ring_from_modulus(6).unwrap());
        let d = z6.decompose_local(&caps).unwrap();
        let mut ids: Vec<u64> = d.factors.iter().map(|f| f.idempotent[0]).collect();
        ids.sort();
        assert_eq!(ids, vec![3, 4]);
        let mut chars: Vec<u64> = d.factors.iter().map(|f| f.ring.characteristic()).collect();
        chars.sort();
        assert_eq!(chars, vec![2, 3]);
        assert!(!z6.is_local(&caps).unwrap());
        assert!(ring_from_modulus(9).unwrap().is_local(&caps).unwrap());
    }

    #[test]
    fn qf_table() {
        let caps = Caps::default();
        assert!(ring_from_modulus(4).unwrap().is_quasi_frobenius(&caps).unwrap());
        let dual_numbers = quotient(2, &["x"], &[&[(&[2], 1)]]);
        assert!(dual_numbers.is_local(&caps).unwrap());
        assert!(dual_numbers.is_quasi_frobenius(&caps).unwrap());
        let r = quotient(2, &["x", "y"], &[&[(&[2, 0], 1)], &[(&[1, 1], 1)], &[(&[0, 2], 1)]]);
        assert_eq!(r.order(), 8);
        assert_eq!(r.local_structure(&caps).unwrap().socle.order(), 4);
        assert!(!r.is_quasi_frobenius(&caps).unwrap());
    }

    #[test]
    fn cap_is_enforced() {
        let caps = Caps { ring_elements: 8, ..Caps::default() };
        let r = ring_from_modulus(16).unwrap();
        assert!(matches!(r.local_structure(&caps), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn invalid_tables_rejected() {
        // non-associative: b1*b1 = b0 + b1 style garbage with wrong identity
        let bad = FiniteRing::from_table(
            2,
            vec!["1".into(), "x".into()],
            vec![vec![vec![1, 0], vec![0, 1]], vec![vec![1, 0], vec![0, 0]]],
            vec![0, 1],
            Vec::new(),
            RingSource::Raw,
        );
        assert!(bad.is_err());
    }
}
