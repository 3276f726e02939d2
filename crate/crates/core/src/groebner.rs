//! Polynomials over prime fields and reduced Gröbner bases (degrevlex).
//!
//! The only consumer downstream is [`build_ring`], which turns a
//! zero-dimensional ideal into a [`FiniteRing`] whose basis is the set of
//! standard monomials.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::inverse_mod;
use crate::ring::{FiniteRing, RingSource};

/// Exponent vector ordered by degree-reverse-lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other`; caller guarantees divisibility.
    pub fn div(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn format(&self, vars: &[String]) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .zip(vars)
            .filter(|(e, _)| **e > 0)
            .map(|(e, v)| if *e == 1 { v.clone() } else { format!("{v}^{e}") })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        // reverse lex: the smaller exponent in the last differing variable wins
        for (a, b) in self.0.iter().zip(&other.0).rev() {
            if a != b {
                return b.cmp(a);
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial over 𝔽p in a fixed list of variables.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    prime: u64,
    vars: Arc<Vec<String>>,
    terms: BTreeMap<Monomial, u64>,
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(mono, &c)| {
                let m = mono.format(&self.vars);
                match (c, m.as_str()) {
                    (c, "1") => c.to_string(),
                    (1, _) => m,
                    _ => format!("{c}*{m}"),
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

impl Polynomial {
    pub fn zero(prime: u64, vars: Arc<Vec<String>>) -> Self {
        Self { prime, vars, terms: BTreeMap::new() }
    }

    pub fn constant(prime: u64, vars: Arc<Vec<String>>, c: i64) -> Self {
        let mut p = Self::zero(prime, vars);
        let n = p.vars.len();
        p.add_term(Monomial::one(n), c.rem_euclid(prime as i64) as u64);
        p
    }

    pub fn variable(prime: u64, vars: Arc<Vec<String>>, index: usize) -> Self {
        let mut p = Self::zero(prime, vars);
        let n = p.vars.len();
        p.add_term(Monomial::var(n, index), 1);
        p
    }

    pub fn from_terms(
        prime: u64,
        vars: Arc<Vec<String>>,
        terms: impl IntoIterator<Item = (Vec<u32>, i64)>,
    ) -> Result<Self> {
        let mut p = Self::zero(prime, vars);
        for (e, c) in terms {
            if e.len() != p.vars.len() {
                return Err(Error::DimensionMismatch("exponent tuple length".into()));
            }
            p.add_term(Monomial(e), c.rem_euclid(prime as i64) as u64);
        }
        Ok(p)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn vars(&self) -> &Arc<Vec<String>> {
        &self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, u64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, mono: Monomial, c: u64) {
        let p = self.prime;
        let c = c % p;
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(mono.clone()).or_insert(0);
        *entry = (*entry + c) % p;
        if *entry == 0 {
            self.terms.remove(&mono);
        }
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.prime != other.prime || self.vars != other.vars {
            return Err(Error::PolynomialMismatch);
        }
        Ok(())
    }

    pub fn leading(&self) -> Option<(&Monomial, u64)> {
        self.terms.iter().next_back().map(|(m, &c)| (m, c))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(self.prime - 1)
    }

    pub fn scale(&self, c: u64) -> Self {
        let mut out = Self::zero(self.prime, self.vars.clone());
        for (m, &a) in &self.terms {
            out.add_term(m.clone(), a * (c % self.prime));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let mut out = Self::zero(self.prime, self.vars.clone());
        for (ma, &a) in &self.terms {
            for (mb, &b) in &other.terms {
                out.add_term(ma.mul(mb), a * b);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut acc = Self::constant(self.prime, self.vars.clone(), 1);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    fn mul_term(&self, mono: &Monomial, c: u64) -> Self {
        let mut out = Self::zero(self.prime, self.vars.clone());
        for (m, &a) in &self.terms {
            out.add_term(m.mul(mono), a * c);
        }
        out
    }

    fn monic(&self) -> Self {
        match self.leading() {
            Some((_, c)) => self.scale(inverse_mod(c, self.prime).expect("field")),
            None => self.clone(),
        }
    }

    /// Full reduction of `self` by `divisors`: no term of the result is
    /// divisible by a leading term of any divisor.
    fn reduce_by(&self, divisors: &[Polynomial]) -> Polynomial {
        let p = self.prime;
        let mut rest = self.clone();
        let mut out = Self::zero(p, self.vars.clone());
        while let Some((lm, lc)) = rest.leading().map(|(m, c)| (m.clone(), c)) {
            let hit = divisors.iter().find_map(|g| {
                let (gm, gc) = g.leading()?;
                gm.divides(&lm).then(|| (g, gm.clone(), gc))
            });
            match hit {
                Some((g, gm, gc)) => {
                    let factor = lc * inverse_mod(gc, p).expect("field") % p;
                    let q = lm.div(&gm);
                    rest = rest.sub(&g.mul_term(&q, factor)).expect("same ring");
                }
                None => {
                    rest.terms.remove(&lm);
                    out.add_term(lm, lc);
                }
            }
        }
        out
    }
}

fn s_polynomial(f: &Polynomial, g: &Polynomial) -> Polynomial {
    let (fm, fc) = f.leading().expect("nonzero");
    let (gm, gc) = g.leading().expect("nonzero");
    let l = fm.lcm(gm);
    let p = f.prime;
    let a = f.mul_term(&l.div(fm), inverse_mod(fc, p).expect("field"));
    let b = g.mul_term(&l.div(gm), inverse_mod(gc, p).expect("field"));
    a.sub(&b).expect("same ring")
}

/// A reduced Gröbner basis together with its quotient data.
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    prime: u64,
    vars: Arc<Vec<String>>,
    basis: Vec<Polynomial>,
    standard: Option<Vec<Monomial>>,
}

impl GroebnerBasis {
    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn vars(&self) -> &Arc<Vec<String>> {
        &self.vars
    }

    pub fn basis(&self) -> &[Polynomial] {
        &self.basis
    }

    pub fn is_zero_dimensional(&self) -> bool {
        self.standard.is_some()
    }

    pub fn normal_form(&self, f: &Polynomial) -> Result<Polynomial> {
        if f.prime != self.prime || f.vars != self.vars {
            return Err(Error::PolynomialMismatch);
        }
        Ok(f.reduce_by(&self.basis))
    }

    /// Monomials outside the initial ideal, ascending in degrevlex.
    pub fn standard_monomials(&self) -> Result<&[Monomial]> {
        self.standard.as_deref().ok_or(Error::NotZeroDimensional)
    }

    /// Canonical text form `GF(p)[vars]/(gens)`.
    pub fn describe(&self) -> String {
        let gens: Vec<String> = self.basis.iter().map(|g| g.to_string()).collect();
        format!("GF({})[{}]/({})", self.prime, self.vars.join(","), gens.join(", "))
    }
}

/// Buchberger's algorithm with full inter-reduction of the result.
pub fn buchberger(generators: &[Polynomial]) -> Result<GroebnerBasis> {
    let first = generators
        .first()
        .ok_or_else(|| Error::DimensionMismatch("no generators".into()))?;
    let (prime, vars) = (first.prime, first.vars.clone());
    if !is_prime(prime) {
        return Err(Error::NotPrime(prime));
    }
    for g in generators {
        first.compatible(g)?;
    }
    let mut basis: Vec<Polynomial> =
        generators.iter().filter(|g| !g.is_zero()).map(|g| g.monic()).collect();
    let mut pairs: Vec<(usize, usize)> = (0..basis.len())
        .flat_map(|j| (0..j).map(move |i| (i, j)))
        .collect();
    while let Some((i, j)) = pairs.pop() {
        let (li, lj) = (basis[i].leading().unwrap().0, basis[j].leading().unwrap().0);
        // coprime leading monomials: the S-polynomial reduces to zero
        if li.0.iter().zip(&lj.0).all(|(a, b)| *a == 0 || *b == 0) {
            continue;
        }
        let r = s_polynomial(&basis[i], &basis[j]).reduce_by(&basis);
        if !r.is_zero() {
            let k = basis.len();
            basis.push(r.monic());
            pairs.extend((0..k).map(|i| (i, k)));
        }
    }
    // minimalize
    let mut minimal: Vec<Polynomial> = Vec::new();
    for (i, g) in basis.iter().enumerate() {
        let gm = g.leading().unwrap().0;
        let redundant = basis.iter().enumerate().any(|(j, h)| {
            let hm = h.leading().unwrap().0;
            j != i && hm.divides(gm) && (hm != gm || j < i)
        });
        if !redundant {
            minimal.push(g.clone());
        }
    }
    // inter-reduce
    let mut reduced = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<Polynomial> = minimal
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, g)| g.clone())
            .collect();
        let lead = minimal[i].leading().unwrap();
        let (lm, lc) = (lead.0.clone(), lead.1);
        let mut tail = minimal[i].clone();
        tail.terms.remove(&lm);
        let mut g = tail.reduce_by(&others);
        g.add_term(lm, lc);
        reduced.push(g.monic());
    }
    reduced.sort_by(|a, b| a.leading().unwrap().0.cmp(b.leading().unwrap().0));
    let standard = standard_monomials_of(&reduced, vars.len());
    Ok(GroebnerBasis { prime, vars, basis: reduced, standard })
}

fn standard_monomials_of(basis: &[Polynomial], nvars: usize) -> Option<Vec<Monomial>> {
    let leads: Vec<&Monomial> = basis.iter().map(|g| g.leading().unwrap().0).collect();
    if leads.iter().any(|m| m.degree() == 0) {
        return Some(Vec::new());
    }
    // each variable needs a pure power among the leading monomials
    let mut bounds = Vec::with_capacity(nvars);
    for v in 0..nvars {
        let b = leads
            .iter()
            .filter(|m| m.0.iter().enumerate().all(|(i, &e)| i == v || e == 0) && m.0[v] > 0)
            .map(|m| m.0[v])
            .min()?;
        bounds.push(b);
    }
    let mut out = Vec::new();
    let mut e = vec![0u32; nvars];
    loop {
        let mono = Monomial(e.clone());
        if !leads.iter().any(|l| l.divides(&mono)) {
            out.push(mono);
        }
        // mixed-radix increment
        let mut i = 0;
        loop {
            if i == nvars {
                out.sort();
                return Some(out);
            }
            e[i] += 1;
            if e[i] < bounds[i] {
                break;
            }
            e[i] = 0;
            i += 1;
        }
    }
}

/// The quotient 𝔽p[vars]/I as a finite ring on the standard monomials.
pub fn build_ring(gb: &GroebnerBasis) -> Result<FiniteRing> {
    let standard = gb.standard_monomials()?;
    if standard.is_empty() {
        return Err(Error::UnitIdeal);
    }
    let k = standard.len();
    let p = gb.prime;
    let index: BTreeMap<&Monomial, usize> = standard.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let coords = |f: &Polynomial| -> Vec<u64> {
        let mut v = vec![0u64; k];
        for (m, c) in f.terms() {
            v[index[m]] = c;
        }
        v
    };
    let mut table = vec![vec![Vec::new(); k]; k];
    for i in 0..k {
        for j in 0..k {
            let prod = Polynomial::from_terms(p, gb.vars.clone(), [(standard[i].mul(&standard[j]).0, 1)])?;
            table[i][j] = coords(&gb.normal_form(&prod)?);
        }
    }
    let one = Polynomial::constant(p, gb.vars.clone(), 1);
    let identity = coords(&gb.normal_form(&one)?);
    let labels = standard.iter().map(|m| m.format(&gb.vars)).collect();
    let mut named = Vec::new();
    for (i, v) in gb.vars.iter().enumerate() {
        let x = Polynomial::variable(p, gb.vars.clone(), i);
        named.push((v.clone(), coords(&gb.normal_form(&x)?)));
    }
    FiniteRing::from_table(p, labels, table, identity, named, RingSource::Quotient(gb.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(names: &[&str]) -> Arc<Vec<String>> {
        Arc::new(names.iter().map(|s| s.to_string()).collect())
    }

    fn poly(p: u64, v: &Arc<Vec<String>>, terms: &[(&[u32], i64)]) -> Polynomial {
        Polynomial::from_terms(p, v.clone(), terms.iter().map(|(e, c)| (e.to_vec(), *c))).unwrap()
    }

    #[test]
    fn degrevlex_order() {
        let x2 = Monomial(vec![2, 0]);
        let xy = Monomial(vec![1, 1]);
        let y2 = Monomial(vec![0, 2]);
        let x = Monomial(vec![1, 0]);
        assert!(x2 > xy && xy > y2 && y2 > x);
        // degrevlex on three variables: x*z < y^2
        assert!(Monomial(vec![1, 0, 1]) < Monomial(vec![0, 2, 0]));
    }

    #[test]
    fn single_monomial_basis() {
        let v = vars(&["x"]);
        let gb = buchberger(&[poly(2, &v, &[(&[2], 1)])]).unwrap();
        assert_eq!(gb.basis().len(), 1);
        let std: Vec<_> = gb.standard_monomials().unwrap().to_vec();
        assert_eq!(std, vec![Monomial(vec![0]), Monomial(vec![1])]);
    }

    #[test]
    fn monomial_ideal_is_its_own_basis() {
        let v = vars(&["x", "y"]);
        let gens = [poly(2, &v, &[(&[2, 0], 1)]), poly(2, &v, &[(&[0, 2], 1)]), poly(2, &v, &[(&[1, 1], 1)])];
        let gb = buchberger(&gens).unwrap();
        let leads: Vec<_> = gb.basis().iter().map(|g| g.leading().unwrap().0.clone()).collect();
        assert_eq!(leads, vec![Monomial(vec![0, 2]), Monomial(vec![1, 1]), Monomial(vec![2, 0])]);
        assert_eq!(gb.standard_monomials().unwrap().len(), 3);
    }

    #[test]
    fn normal_forms() {
        let v = vars(&["x"]);
        let gb = buchberger(&[poly(2, &v, &[(&[2], 1)])]).unwrap();
        assert!(gb.normal_form(&poly(2, &v, &[(&[3], 1)])).unwrap().is_zero());
        assert_eq!(gb.normal_form(&poly(2, &v, &[(&[2], 1), (&[1], 1)])).unwrap(), poly(2, &v, &[(&[1], 1)]));

        let v = vars(&["x", "y"]);
        let gb = buchberger(&[poly(2, &v, &[(&[2, 0], 1), (&[0, 1], 1)]), poly(2, &v, &[(&[0, 2], 1)])]).unwrap();
        let nf = gb.normal_form(&poly(2, &v, &[(&[3, 0], 1)])).unwrap();
        assert_eq!(nf, poly(2, &v, &[(&[1, 1], 1)]));
    }

    #[test]
    fn positive_dimensional_is_rejected() {
        let v = vars(&["x", "y"]);
        let gb = buchberger(&[poly(2, &v, &[(&[1, 0], 1)])]).unwrap();
        assert!(!gb.is_zero_dimensional());
        assert_eq!(gb.standard_monomials(), Err(Error::NotZeroDimensional));
        assert!(matches!(build_ring(&gb), Err(Error::NotZeroDimensional)));
    }

    #[test]
    fn unit_ideal_is_rejected() {
        let v = vars(&["x"]);
        let gb = buchberger(&[poly(3, &v, &[(&[1], 1)]), poly(3, &v, &[(&[1], 1), (&[0], 1)])]).unwrap();
        assert_eq!(gb.basis().len(), 1);
        assert!(matches!(build_ring(&gb), Err(Error::UnitIdeal)));
    }

    #[test]
    fn non_prime_field_is_rejected() {
        let v = vars(&["x"]);
        assert_eq!(buchberger(&[poly(4, &v, &[(&[2], 1)])]).unwrap_err(), Error::NotPrime(4));
    }
}
