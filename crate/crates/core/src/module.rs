//! Finite modules over finite rings and maps between them.
//!
//! A module is `(Z/m)^n / L` where `L` is a row span stable under the ring
//! action. Each ring basis element `b_l` acts by an `n×n` matrix `A_l`, with
//! vectors as rows (`x ↦ x·A_l`). Relation spans are kept in Howell form and
//! never contain a unit pivot: such coordinates are eliminated on
//! construction, so `n` is as small as the Howell form allows.

use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::linalg::{preimage_of_span, solve_modulo, solve_rows_modulo, Howell, ResidueMatrix};
use crate::ring::{Element, FiniteRing};

/// A matrix with entries in a ring, stored as coordinate vectors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Element>,
}

impl RingMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Element>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} ring matrix",
                entries.len()
            )));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(ring: &FiniteRing, rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![ring.zero(); rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<Element>>, cols: usize) -> Result<Self> {
        let r = rows.len();
        if rows.iter().any(|row| row.len() != cols) {
            return Err(Error::DimensionMismatch("ragged ring matrix".into()));
        }
        Ok(Self { rows: r, cols, entries: rows.into_iter().flatten().collect() })
    }

    /// Reads rows of `R^t` in block coordinates (`t·k` columns).
    pub fn from_free_rows(mat: &ResidueMatrix, k: usize) -> Self {
        let t = if k == 0 { 0 } else { mat.cols() / k };
        let mut entries = Vec::with_capacity(mat.rows() * t);
        for row in mat.row_iter() {
            for j in 0..t {
                entries.push(row[j * k..(j + 1) * k].to_vec());
            }
        }
        Self { rows: mat.rows(), cols: t, entries }
    }

    /// Rows as elements of `R^cols` in block coordinates.
    pub fn to_free_rows(&self, ring: &FiniteRing) -> ResidueMatrix {
        let k = ring.rank();
        let mut out = ResidueMatrix::zeros(ring.characteristic(), self.rows, self.cols * k);
        for i in 0..self.rows {
            let row = out.row_mut(i);
            for j in 0..self.cols {
                row[j * k..(j + 1) * k].copy_from_slice(self.get(i, j));
            }
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Element {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Element) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j).clone());
            }
        }
        Self { rows: self.cols, cols: self.rows, entries }
    }

    pub fn mul(&self, ring: &FiniteRing, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch("ring matrix product".into()));
        }
        let mut out = Self::zeros(ring, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = ring.zero();
                for l in 0..self.cols {
                    acc = ring.add(&acc, &ring.mul(self.get(i, l), other.get(l, j)));
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }
}

/// Serializable module: dimension, relation rows and action matrices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleData {
    pub modulus: u64,
    pub dim: usize,
    pub relations: Vec<Vec<u64>>,
    pub action: Vec<Vec<Vec<u64>>>,
}

/// Minimal generating set, chosen factor by factor.
#[derive(Clone, Debug)]
pub struct Generators {
    /// `t×n`, one generator per row.
    pub rows: ResidueMatrix,
    /// Minimal number of generators of `e_i·M` per local factor.
    pub local_counts: Vec<usize>,
}

/// `R^s --ρ--> R^t --Π--> M --> 0` with a set-theoretic section of `Π`.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub generators: ResidueMatrix,
    /// Row `j·k + c` is `b_c·g_j`.
    pub cover: ResidueMatrix,
    /// Row `i` is a preimage in `R^t` of the `i`-th coordinate vector.
    pub section: ResidueMatrix,
    /// Minimal generators of `ker Π`, as an `s×t` ring matrix.
    pub relations: RingMatrix,
}

pub struct FiniteModule {
    ring: Arc<FiniteRing>,
    relations: Howell,
    action: Vec<ResidueMatrix>,
    generators: OnceLock<Generators>,
    presentation: OnceLock<Presentation>,
}

impl std::fmt::Debug for FiniteModule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FiniteModule(dim {}, order {})", self.dim(), self.order())
    }
}

impl FiniteModule {
    /// Validates the module axioms, then compresses.
    pub fn from_data(ring: &Arc<FiniteRing>, data: &ModuleData) -> Result<Arc<Self>> {
        let m = ring.characteristic();
        if data.modulus != m {
            return Err(Error::ModulusMismatch(data.modulus, m));
        }
        let n = data.dim;
        if data.action.len() != ring.rank() {
            return Err(Error::InvalidModule(format!(
                "{} action matrices for a ring of rank {}",
                data.action.len(),
                ring.rank()
            )));
        }
        let action = data
            .action
            .iter()
            .map(|a| {
                if a.len() != n {
                    return Err(Error::InvalidModule("action matrix has wrong size".into()));
                }
                ResidueMatrix::from_rows(m, n, a)
            })
            .collect::<Result<Vec<_>>>()?;
        let rel = ResidueMatrix::from_rows(m, n, &data.relations)?;
        let (module, _, _) = quotient_of_ambient(ring, n, &rel, &action, true)?;
        Ok(module)
    }

    pub fn to_data(&self) -> ModuleData {
        ModuleData {
            modulus: self.modulus(),
            dim: self.dim(),
            relations: self.relations.basis().to_rows(),
            action: self.action.iter().map(|a| a.to_rows()).collect(),
        }
    }

    /// `R^t` in block coordinates.
    pub fn free(ring: &Arc<FiniteRing>, t: usize) -> Arc<Self> {
        let k = ring.rank();
        let m = ring.characteristic();
        let action = ring
            .basis_mult()
            .iter()
            .map(|a| block_repeat(a, t, m, k))
            .collect();
        Arc::new(Self::raw(ring, ResidueMatrix::zeros(m, 0, t * k).howell(), action))
    }

    pub fn regular(ring: &Arc<FiniteRing>) -> Arc<Self> {
        Self::free(ring, 1)
    }

    pub fn zero(ring: &Arc<FiniteRing>) -> Arc<Self> {
        Self::free(ring, 0)
    }

    /// Cokernel of `R^s → R^t`, `x ↦ x·r`, for an `s×t` ring matrix.
    pub fn cokernel_of_matrix(ring: &Arc<FiniteRing>, r: &RingMatrix) -> Result<Arc<Self>> {
        let free = Self::free(ring, r.cols());
        let rows = r.to_free_rows(ring);
        Ok(free.quotient_by(&rows)?.0)
    }

    /// The ideal generated by `gens`, as a submodule of `R`.
    pub fn ideal(ring: &Arc<FiniteRing>, gens: &[Element]) -> Result<Arc<Self>> {
        let r = Self::regular(ring);
        let rows = ResidueMatrix::from_rows(ring.characteristic(), ring.rank(), gens)?;
        Ok(r.submodule_generated_by(&rows)?.source().clone())
    }

    fn raw(ring: &Arc<FiniteRing>, relations: Howell, action: Vec<ResidueMatrix>) -> Self {
        Self {
            ring: ring.clone(),
            relations,
            action,
            generators: OnceLock::new(),
            presentation: OnceLock::new(),
        }
    }

    pub fn ring(&self) -> &Arc<FiniteRing> {
        &self.ring
    }

    pub fn dim(&self) -> usize {
        self.relations.basis().cols()
    }

    pub fn modulus(&self) -> u64 {
        self.ring.characteristic()
    }

    pub fn relations(&self) -> &Howell {
        &self.relations
    }

    pub fn relation_rows(&self) -> &ResidueMatrix {
        self.relations.basis()
    }

    pub fn action(&self) -> &[ResidueMatrix] {
        &self.action
    }

    pub fn order(&self) -> u128 {
        let full = (self.modulus() as u128).saturating_pow(self.dim() as u32);
        full / self.relations.order()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        self.relations.reduce(v)
    }

    pub fn is_zero_element(&self, v: &[u64]) -> bool {
        self.relations.contains(v)
    }

    /// Matrix of `x ↦ r·x`.
    pub fn act_matrix(&self, r: &[u64]) -> ResidueMatrix {
        let n = self.dim();
        let mut out = ResidueMatrix::zeros(self.modulus(), n, n);
        for (l, &c) in r.iter().enumerate() {
            if c != 0 {
                out.add_scaled(c, &self.action[l]);
            }
        }
        out
    }

    pub fn act(&self, r: &[u64], x: &[u64]) -> Vec<u64> {
        self.reduce(&self.act_matrix(r).apply(x))
    }

    /// Additive span of the `R`-orbits of the given rows, plus the relations.
    pub fn span_of(&self, rows: &ResidueMatrix) -> Result<Howell> {
        Ok(self.relation_rows().vstack(&r_span_rows(rows, &self.action)?)?.howell())
    }

    /// Every element exactly once, as canonical representatives.
    pub fn elements(&self, cap: u128) -> Result<impl Iterator<Item = Vec<u64>> + '_> {
        let total = self.order();
        if total > cap {
            return Err(Error::CapExceeded { what: "enumerating a module".into(), needed: total, cap });
        }
        let m = self.modulus();
        let n = self.dim();
        let mut radix = vec![m; n];
        for &(c, p) in self.relations.pivots() {
            radix[c] = p;
        }
        Ok((0..total).map(move |mut idx| {
            let mut v = vec![0u64; n];
            for (x, &r) in v.iter_mut().zip(&radix) {
                *x = (idx % r as u128) as u64;
                idx /= r as u128;
            }
            v
        }))
    }

    /// `N^t` in block coordinates.
    pub fn power(self: &Arc<Self>, t: usize) -> Arc<Self> {
        if t == 1 {
            return self.clone();
        }
        let m = self.modulus();
        let n = self.dim();
        let mut rel = ResidueMatrix::zeros(m, 0, t * n);
        for i in 0..t {
            for row in self.relation_rows().row_iter() {
                let mut v = vec![0u64; t * n];
                v[i * n..(i + 1) * n].copy_from_slice(row);
                rel.push_row(&v);
            }
        }
        let action = self.action.iter().map(|a| block_repeat(a, t, m, n)).collect();
        Arc::new(Self::raw(&self.ring, rel.howell(), action))
    }

    /// `M ⊕ N` with its injections and projections.
    pub fn direct_sum(self: &Arc<Self>, other: &Arc<Self>) -> Result<DirectSum> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        let m = self.modulus();
        let (a, b) = (self.dim(), other.dim());
        let rel = ResidueMatrix::block_diag(&[self.relation_rows(), other.relation_rows()])?;
        let action = self
            .action
            .iter()
            .zip(&other.action)
            .map(|(x, y)| ResidueMatrix::block_diag(&[x, y]))
            .collect::<Result<Vec<_>>>()?;
        let sum = Arc::new(Self::raw(&self.ring, rel.howell(), action));
        let id_a = ResidueMatrix::identity(m, a);
        let id_b = ResidueMatrix::identity(m, b);
        let inj1 = id_a.hstack(&ResidueMatrix::zeros(m, a, b))?;
        let inj2 = ResidueMatrix::zeros(m, b, a).hstack(&id_b)?;
        Ok(DirectSum {
            inclusions: [
                ModuleMap::new_unchecked(self, &sum, inj1.clone()),
                ModuleMap::new_unchecked(other, &sum, inj2.clone()),
            ],
            projections: [
                ModuleMap::new_unchecked(&sum, self, inj1.transpose()),
                ModuleMap::new_unchecked(&sum, other, inj2.transpose()),
            ],
            sum,
        })
    }

    /// `⊕ parts` with the coordinate offset of each summand.
    pub fn direct_sum_all(ring: &Arc<FiniteRing>, parts: &[Arc<Self>]) -> Result<(Arc<Self>, Vec<usize>)> {
        let m = ring.characteristic();
        if parts.iter().any(|p| p.ring() != ring) {
            return Err(Error::RingMismatch);
        }
        let mut offsets = Vec::with_capacity(parts.len());
        let mut total = 0;
        for p in parts {
            offsets.push(total);
            total += p.dim();
        }
        let mut rel = ResidueMatrix::zeros(m, 0, total);
        for (p, &off) in parts.iter().zip(&offsets) {
            for row in p.relation_rows().row_iter() {
                let mut v = vec![0u64; total];
                v[off..off + p.dim()].copy_from_slice(row);
                rel.push_row(&v);
            }
        }
        let action = (0..ring.rank())
            .map(|l| {
                let mut a = ResidueMatrix::zeros(m, total, total);
                for (p, &off) in parts.iter().zip(&offsets) {
                    a.put_block(off, off, &p.action[l]);
                }
                a
            })
            .collect();
        Ok((Arc::new(Self::raw(ring, rel.howell(), action)), offsets))
    }

    /// Quotient by the submodule generated by `rows`, with its projection.
    pub fn quotient_by(self: &Arc<Self>, rows: &ResidueMatrix) -> Result<(Arc<Self>, ModuleMap)> {
        let (proj, _) = self.quotient_with_lift(rows)?;
        Ok((proj.target().clone(), proj))
    }

    /// Like [`quotient_by`](Self::quotient_by), also returning a coordinate lift.
    pub fn quotient_with_lift(self: &Arc<Self>, rows: &ResidueMatrix) -> Result<(ModuleMap, ResidueMatrix)> {
        let rel = self.relation_rows().vstack(&r_span_rows(rows, &self.action)?)?;
        let (q, p, lift) = quotient_of_ambient(&self.ring, self.dim(), &rel, &self.action, false)?;
        Ok((ModuleMap::new_unchecked(self, &q, p), lift))
    }

    /// Submodule generated by `rows`, returned as its inclusion map.
    pub fn submodule_generated_by(self: &Arc<Self>, rows: &ResidueMatrix) -> Result<ModuleMap> {
        let closed = r_span_rows(rows, &self.action)?;
        self.submodule_from_additive(&closed)
    }

    /// Submodule whose additive span (with the relations) is `R`-stable.
    pub fn submodule_from_additive(self: &Arc<Self>, rows: &ResidueMatrix) -> Result<ModuleMap> {
        let (sub, embed) =
            subquotient(&self.ring, self.relation_rows(), &self.action, rows)?;
        Ok(ModuleMap::new_unchecked(&sub, self, embed))
    }

    /// Minimal generators: for each local factor `e·R`, a basis of
    /// `e·M / J·e·M` lifted to `M`; generators of different factors are summed.
    pub fn generators(&self, caps: &Caps) -> Result<&Generators> {
        if let Some(g) = self.generators.get() {
            return Ok(g);
        }
        let g = self.compute_generators(caps)?;
        let _ = self.generators.set(g);
        Ok(self.generators.get().expect("just set"))
    }

    fn compute_generators(&self, caps: &Caps) -> Result<Generators> {
        let ls = self.ring.local_structure(caps)?;
        let m = self.modulus();
        let n = self.dim();
        let mut chosen_per_factor = Vec::with_capacity(ls.factors.len());
        for f in &ls.factors {
            let ae = self.act_matrix(&f.idempotent);
            let mut base = self.relation_rows().clone();
            for j in ls.radical.basis().row_iter() {
                base = base.vstack(&self.act_matrix(j).mul(&ae)?)?;
            }
            let mut span = base.howell();
            let mut chosen: Vec<Vec<u64>> = Vec::new();
            for c in 0..n {
                let cand = ae.row(c);
                if span.contains(cand) {
                    continue;
                }
                chosen.push(cand.to_vec());
                let orbit = r_span_rows(&ResidueMatrix::from_rows(m, n, &[cand])?, &self.action)?;
                span = span.basis().vstack(&orbit)?.howell();
            }
            chosen_per_factor.push(chosen);
        }
        let t = chosen_per_factor.iter().map(Vec::len).max().unwrap_or(0);
        let mut rows = ResidueMatrix::zeros(m, t, n);
        for chosen in &chosen_per_factor {
            for (j, g) in chosen.iter().enumerate() {
                let sum: Vec<u64> = rows.row(j).iter().zip(g).map(|(a, b)| (a + b) % m).collect();
                rows.row_mut(j).copy_from_slice(&sum);
            }
        }
        let rows = ResidueMatrix::from_rows(m, n, &rows.row_iter().map(|r| self.reduce(r)).collect::<Vec<_>>())?;
        Ok(Generators { rows, local_counts: chosen_per_factor.iter().map(Vec::len).collect() })
    }

    pub fn num_generators(&self, caps: &Caps) -> Result<usize> {
        Ok(self.generators(caps)?.rows.rows())
    }

    pub fn presentation(&self, caps: &Caps) -> Result<&Presentation> {
        if let Some(p) = self.presentation.get() {
            return Ok(p);
        }
        let p = self.compute_presentation(caps)?;
        let _ = self.presentation.set(p);
        Ok(self.presentation.get().expect("just set"))
    }

    fn compute_presentation(&self, caps: &Caps) -> Result<Presentation> {
        let gens = self.generators(caps)?.rows.clone();
        let m = self.modulus();
        let n = self.dim();
        let k = self.ring.rank();
        let t = gens.rows();
        let mut cover = ResidueMatrix::zeros(m, t * k, n);
        for j in 0..t {
            for c in 0..k {
                let v = self.reduce(&self.action[c].apply(gens.row(j)));
                cover.row_mut(j * k + c).copy_from_slice(&v);
            }
        }
        let section = solve_rows_modulo(&cover, &ResidueMatrix::identity(m, n), self.relation_rows())?
            .ok_or_else(|| Error::Internal("generators do not generate".into()))?;
        let kernel_rows = preimage_of_span(&cover, self.relation_rows())?;
        let free = Self::free(&self.ring, t);
        let kernel = free.submodule_from_additive(&kernel_rows)?;
        let kgens = kernel.source().generators(caps)?.rows.mul(kernel.matrix())?;
        Ok(Presentation {
            generators: gens,
            cover,
            section,
            relations: RingMatrix::from_free_rows(&kgens, k),
        })
    }

    /// `|J·M|` for the Jacobson radical `J`.
    pub fn radical_submodule_order(&self, caps: &Caps) -> Result<u128> {
        let ls = self.ring.local_structure(caps)?;
        let mut rows = self.relation_rows().clone();
        for j in ls.radical.basis().row_iter() {
            rows = rows.vstack(&self.act_matrix(j))?;
        }
        Ok(rows.howell().order() / self.relations.order())
    }

    /// `|{x : J·x = 0}|`.
    pub fn socle_order(&self, caps: &Caps) -> Result<u128> {
        let ls = self.ring.local_structure(caps)?;
        let m = self.modulus();
        let n = self.dim();
        let mut big = ResidueMatrix::zeros(m, n, 0);
        let mut rel = ResidueMatrix::zeros(m, 0, 0);
        for j in ls.radical.basis().row_iter() {
            big = big.hstack(&self.act_matrix(j))?;
            rel = ResidueMatrix::block_diag(&[&rel, self.relation_rows()])?;
        }
        if big.cols() == 0 {
            return Ok(self.order());
        }
        let pre = preimage_of_span(&big, &rel)?;
        Ok(self.relation_rows().vstack(&pre)?.howell().order() / self.relations.order())
    }

    /// `|e_i·M|` per local factor.
    pub fn local_orders(&self, caps: &Caps) -> Result<Vec<u128>> {
        let ls = self.ring.local_structure(caps)?;
        let mut out = Vec::with_capacity(ls.factors.len());
        for f in &ls.factors {
            let rows = self.relation_rows().vstack(&self.act_matrix(&f.idempotent))?;
            out.push(rows.howell().order() / self.relations.order());
        }
        Ok(out)
    }
}

fn block_repeat(a: &ResidueMatrix, t: usize, m: u64, n: usize) -> ResidueMatrix {
    let mut out = ResidueMatrix::zeros(m, t * n, t * n);
    for i in 0..t {
        out.put_block(i * n, i * n, a);
    }
    out
}

/// Rows `x·A_l` for every row `x` and every action matrix.
pub(crate) fn r_span_rows(rows: &ResidueMatrix, action: &[ResidueMatrix]) -> Result<ResidueMatrix> {
    let m = rows.modulus();
    let mut out = ResidueMatrix::zeros(m, 0, rows.cols());
    for a in action {
        out = out.vstack(&rows.mul(a)?)?;
    }
    Ok(out)
}

/// `(Z/m)^n / span(rel)` with unit-pivot coordinates eliminated.
///
/// Returns the module with `P` (`n×n'`, old coordinates to new) and `Q`
/// (`n'×n`, a lift back). With `validate`, checks that the action is a
/// module structure modulo the relations.
pub(crate) fn quotient_of_ambient(
    ring: &Arc<FiniteRing>,
    n: usize,
    rel: &ResidueMatrix,
    action: &[ResidueMatrix],
    validate: bool,
) -> Result<(Arc<FiniteModule>, ResidueMatrix, ResidueMatrix)> {
    let m = ring.characteristic();
    let h = rel.howell();
    if validate {
        check_module_axioms(ring, &h, action)?;
    }
    let mut unit_rows = vec![None; n];
    for (r, &(c, p)) in h.pivots().iter().enumerate() {
        if p == 1 {
            unit_rows[c] = Some(r);
        }
    }
    let keep: Vec<usize> = (0..n).filter(|&c| unit_rows[c].is_none()).collect();
    let n2 = keep.len();
    let mut index = vec![usize::MAX; n];
    for (i, &c) in keep.iter().enumerate() {
        index[c] = i;
    }
    let mut p = ResidueMatrix::zeros(m, n, n2);
    for c in 0..n {
        match unit_rows[c] {
            None => p.set(c, index[c], 1 % m),
            Some(r) => {
                // e_c ≡ -Σ_{j kept} row_j e_j
                let row = h.basis().row(r);
                for (i, &j) in keep.iter().enumerate() {
                    if row[j] != 0 {
                        p.set(c, i, (m - row[j]) % m);
                    }
                }
            }
        }
    }
    let mut q = ResidueMatrix::zeros(m, n2, n);
    for (i, &c) in keep.iter().enumerate() {
        q.set(i, c, 1 % m);
    }
    let mut new_rel = ResidueMatrix::zeros(m, 0, n2);
    for (r, &(_, piv)) in h.pivots().iter().enumerate() {
        if piv != 1 {
            let row = h.basis().row(r);
            let v: Vec<u64> = keep.iter().map(|&j| row[j]).collect();
            new_rel.push_row(&v);
        }
    }
    let new_action = action
        .iter()
        .map(|a| q.mul(a)?.mul(&p))
        .collect::<Result<Vec<_>>>()?;
    let module = Arc::new(FiniteModule::raw(ring, new_rel.howell(), new_action));
    Ok((module, p, q))
}

fn check_module_axioms(ring: &FiniteRing, rel: &Howell, action: &[ResidueMatrix]) -> Result<()> {
    let n = rel.basis().cols();
    let m = ring.characteristic();
    let k = ring.rank();
    if action.len() != k || action.iter().any(|a| a.rows() != n || a.cols() != n || a.modulus() != m) {
        return Err(Error::InvalidModule("action matrices do not match the ring".into()));
    }
    let rows_in = |mat: &ResidueMatrix| mat.row_iter().all(|r| rel.contains(r));
    for a in action {
        if !rows_in(&rel.basis().mul(a)?) {
            return Err(Error::InvalidModule("relations are not stable under the action".into()));
        }
    }
    let combo = |coeffs: &[u64]| {
        let mut out = ResidueMatrix::zeros(m, n, n);
        for (l, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                out.add_scaled(c, &action[l]);
            }
        }
        out
    };
    if !rows_in(&combo(&ring.one()).sub(&ResidueMatrix::identity(m, n))?) {
        return Err(Error::InvalidModule("identity does not act as the identity".into()));
    }
    for i in 0..k {
        for j in 0..k {
            let lhs = action[i].mul(&action[j])?;
            if !rows_in(&lhs.sub(&combo(&ring.table()[i][j]))?) {
                return Err(Error::InvalidModule(format!("b{i}·(b{j}·x) ≠ (b{i}b{j})·x")));
            }
        }
    }
    Ok(())
}

/// `(S + L)/L` for an `R`-stable additive span `S` in an ambient `(Z/m)^n / L`.
///
/// Returns the module and the embedding matrix (new coordinates to ambient).
pub(crate) fn subquotient(
    ring: &Arc<FiniteRing>,
    ambient_rel: &ResidueMatrix,
    ambient_action: &[ResidueMatrix],
    rows: &ResidueMatrix,
) -> Result<(Arc<FiniteModule>, ResidueMatrix)> {
    let m = ring.characteristic();
    let amb = ambient_rel.howell();
    // drop rows that vanish in the quotient; a Howell basis keeps the count small
    let g0 = rows.howell();
    let kept: Vec<Vec<u64>> = g0
        .basis()
        .row_iter()
        .map(|r| amb.reduce(r))
        .filter(|r| r.iter().any(|&x| x != 0))
        .collect();
    let g = ResidueMatrix::from_rows(m, rows.cols(), &kept)?;
    let g = if g.rows() > 0 { g.howell().basis().clone() } else { g };
    let d = g.rows();
    let rel = preimage_of_span(&g, ambient_rel)?;
    let mut action = Vec::with_capacity(ambient_action.len());
    for a in ambient_action {
        let image = g.mul(a)?;
        let b = solve_rows_modulo(&g, &image, ambient_rel)?
            .ok_or_else(|| Error::Internal("span is not stable under the action".into()))?;
        action.push(b);
    }
    let (module, _, q) = quotient_of_ambient(ring, d, &rel, &action, false)?;
    let embed = q.mul(&g)?;
    Ok((module, embed))
}

/// An `R`-linear map `x ↦ x·F`.
#[derive(Clone, Debug)]
pub struct ModuleMap {
    source: Arc<FiniteModule>,
    target: Arc<FiniteModule>,
    matrix: ResidueMatrix,
}

pub struct DirectSum {
    pub sum: Arc<FiniteModule>,
    pub inclusions: [ModuleMap; 2],
    pub projections: [ModuleMap; 2],
}

impl ModuleMap {
    /// Checks well-definedness and linearity.
    pub fn new(source: &Arc<FiniteModule>, target: &Arc<FiniteModule>, matrix: ResidueMatrix) -> Result<Self> {
        if source.ring != target.ring {
            return Err(Error::RingMismatch);
        }
        if matrix.rows() != source.dim() || matrix.cols() != target.dim() {
            return Err(Error::InvalidMap(format!(
                "{}x{} matrix between modules of dimensions {} and {}",
                matrix.rows(),
                matrix.cols(),
                source.dim(),
                target.dim()
            )));
        }
        let map = Self::new_unchecked(source, target, matrix);
        if !map.zero_on(&source.relation_rows().mul(&map.matrix)?) {
            return Err(Error::InvalidMap("relations are not sent to zero".into()));
        }
        for (a, b) in source.action.iter().zip(&target.action) {
            let diff = a.mul(&map.matrix)?.sub(&map.matrix.mul(b)?)?;
            if !map.zero_on(&diff) {
                return Err(Error::InvalidMap("map is not R-linear".into()));
            }
        }
        Ok(map)
    }

    pub(crate) fn new_unchecked(source: &Arc<FiniteModule>, target: &Arc<FiniteModule>, matrix: ResidueMatrix) -> Self {
        debug_assert_eq!((matrix.rows(), matrix.cols()), (source.dim(), target.dim()));
        Self { source: source.clone(), target: target.clone(), matrix }
    }

    fn zero_on(&self, rows: &ResidueMatrix) -> bool {
        rows.row_iter().all(|r| self.target.is_zero_element(r))
    }

    pub fn identity(m: &Arc<FiniteModule>) -> Self {
        Self::new_unchecked(m, m, ResidueMatrix::identity(m.modulus(), m.dim()))
    }

    pub fn zero(source: &Arc<FiniteModule>, target: &Arc<FiniteModule>) -> Self {
        Self::new_unchecked(source, target, ResidueMatrix::zeros(source.modulus(), source.dim(), target.dim()))
    }

    pub fn source(&self) -> &Arc<FiniteModule> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteModule> {
        &self.target
    }

    pub fn matrix(&self) -> &ResidueMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &[u64]) -> Vec<u64> {
        self.target.reduce(&self.matrix.apply(x))
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ModuleMap) -> Result<ModuleMap> {
        if self.target.dim() != other.source.dim() {
            return Err(Error::InvalidMap("composition of incompatible maps".into()));
        }
        Ok(Self::new_unchecked(&self.source, &other.target, self.matrix.mul(&other.matrix)?))
    }

    pub fn is_zero(&self) -> bool {
        self.zero_on(&self.matrix)
    }

    pub fn equals(&self, other: &ModuleMap) -> Result<bool> {
        Ok(self.zero_on(&self.matrix.sub(&other.matrix)?))
    }

    /// Additive generators of `{x : F(x) = 0}` in source coordinates.
    pub fn kernel_rows(&self) -> Result<ResidueMatrix> {
        preimage_of_span(&self.matrix, self.target.relation_rows())
    }

    /// Inclusion of the kernel into the source.
    pub fn kernel(&self) -> Result<ModuleMap> {
        self.source.submodule_from_additive(&self.kernel_rows()?)
    }

    /// Inclusion of the image into the target.
    pub fn image(&self) -> Result<ModuleMap> {
        self.target.submodule_from_additive(&self.matrix)
    }

    /// Projection of the target onto the cokernel.
    pub fn cokernel(&self) -> Result<ModuleMap> {
        Ok(self.cokernel_with_lift()?.0)
    }

    /// The cokernel projection together with a coordinate lift back to the target.
    pub fn cokernel_with_lift(&self) -> Result<(ModuleMap, ResidueMatrix)> {
        let rel = self.target.relation_rows().vstack(&self.matrix)?;
        let (q, p, lift) =
            quotient_of_ambient(self.target.ring(), self.target.dim(), &rel, &self.target.action, false)?;
        Ok((ModuleMap::new_unchecked(&self.target, &q, p), lift))
    }

    pub fn image_order(&self) -> Result<u128> {
        let rows = self.target.relation_rows().vstack(&self.matrix)?;
        Ok(rows.howell().order() / self.target.relations.order())
    }

    pub fn kernel_order(&self) -> Result<u128> {
        Ok(self.source.order() / self.image_order()?)
    }

    pub fn is_injective(&self) -> Result<bool> {
        Ok(self.image_order()? == self.source.order())
    }

    pub fn is_surjective(&self) -> Result<bool> {
        Ok(self.image_order()? == self.target.order())
    }

    pub fn is_isomorphism(&self) -> Result<bool> {
        Ok(self.source.order() == self.target.order() && self.is_surjective()?)
    }

    /// Corestriction through an injective map `embed: S → target` whose
    /// image contains the image of `self`.
    pub fn factor_through(&self, embed: &ModuleMap) -> Result<ModuleMap> {
        let x = solve_rows_modulo(&embed.matrix, &self.matrix, self.target.relation_rows())?
            .ok_or_else(|| Error::InvalidMap("image does not lie in the given submodule".into()))?;
        Ok(Self::new_unchecked(&self.source, &embed.source, x))
    }

    /// Some preimage of `y` under the map, if one exists.
    pub fn preimage(&self, y: &[u64]) -> Result<Option<Vec<u64>>> {
        solve_modulo(&self.matrix, y, self.target.relation_rows())
    }
}

/// `N^a → N^b`, `x ↦ x·r`, for an `a×b` ring matrix `r`.
pub fn power_map_between(
    n: &FiniteModule,
    r: &RingMatrix,
    source: &Arc<FiniteModule>,
    target: &Arc<FiniteModule>,
) -> ModuleMap {
    let d = n.dim();
    let mut mat = ResidueMatrix::zeros(n.modulus(), r.rows() * d, r.cols() * d);
    for i in 0..r.rows() {
        for j in 0..r.cols() {
            let e = r.get(i, j);
            if e.iter().any(|&c| c != 0) {
                mat.put_block(i * d, j * d, &n.act_matrix(e));
            }
        }
    }
    ModuleMap::new_unchecked(source, target, mat)
}

pub fn power_map(n: &Arc<FiniteModule>, r: &RingMatrix) -> ModuleMap {
    let src = n.power(r.rows());
    let dst = n.power(r.cols());
    power_map_between(n, r, &src, &dst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::ring_from_modulus;

    fn z(n: u64) -> Arc<FiniteRing> {
        Arc::new(ring_from_modulus(n).unwrap())
    }

    #[test]
    fn cyclic_modules_over_z4() {
        let r = z(4);
        let m = FiniteModule::cokernel_of_matrix(&r, &RingMatrix::new(1, 1, vec![vec![2]]).unwrap()).unwrap();
        assert_eq!(m.order(), 2);
        assert_eq!(m.dim(), 1);
        let unit = FiniteModule::cokernel_of_matrix(&r, &RingMatrix::new(1, 1, vec![vec![3]]).unwrap()).unwrap();
        assert!(unit.is_zero());
        assert_eq!(unit.order(), 1);
    }

    #[test]
    fn generators_and_presentation() {
        let r = z(4);
        let caps = Caps::default();
        let m = FiniteModule::cokernel_of_matrix(&r, &RingMatrix::new(1, 2, vec![vec![2], vec![0]]).unwrap()).unwrap();
        assert_eq!(m.order(), 8);
        assert_eq!(m.num_generators(&caps).unwrap(), 2);
        let p = m.presentation(&caps).unwrap();
        assert_eq!(p.relations.rows(), 1);
        let coker = FiniteModule::cokernel_of_matrix(&r, &p.relations).unwrap();
        assert_eq!(coker.order(), 8);
    }

    #[test]
    fn z6_generators_combine_factors() {
        let r = z(6);
        let caps = Caps::default();
        let f = FiniteModule::free(&r, 1);
        assert_eq!(f.num_generators(&caps).unwrap(), 1);
        let m = FiniteModule::cokernel_of_matrix(&r, &RingMatrix::new(1, 2, vec![vec![2], vec![3]]).unwrap()).unwrap();
        // Z/6 ⊕ Z/6 / (2,3): order 6, cyclic
        assert_eq!(m.order(), 6);
        assert_eq!(m.num_generators(&caps).unwrap(), 1);
    }

    #[test]
    fn invalid_module_data_rejected() {
        let r = z(4);
        let bad = ModuleData { modulus: 4, dim: 1, relations: vec![], action: vec![vec![vec![2]]] };
        assert!(FiniteModule::from_data(&r, &bad).is_err());
        let ok = ModuleData { modulus: 4, dim: 1, relations: vec![vec![2]], action: vec![vec![vec![1]]] };
        assert_eq!(FiniteModule::from_data(&r, &ok).unwrap().order(), 2);
    }

    #[test]
    fn maps_kernel_image_cokernel() {
        let r = z(4);
        let f = FiniteModule::regular(&r);
        let two = ModuleMap::new(&f, &f, ResidueMatrix::from_rows(4, 1, &[[2u64]]).unwrap()).unwrap();
        assert_eq!(two.kernel().unwrap().source().order(), 2);
        assert_eq!(two.image().unwrap().source().order(), 2);
        assert_eq!(two.cokernel().unwrap().target().order(), 2);
        assert!(!two.is_injective().unwrap());
        let q = FiniteModule::cokernel_of_matrix(&r, &RingMatrix::new(1, 1, vec![vec![2]]).unwrap()).unwrap();
        assert!(ModuleMap::new(&q, &f, ResidueMatrix::from_rows(4, 1, &[[1u64]]).unwrap()).is_err());
        assert!(ModuleMap::new(&q, &f, ResidueMatrix::from_rows(4, 1, &[[2u64]]).unwrap()).is_ok());
    }

    #[test]
    fn element_enumeration_matches_order() {
        let r = z(4);
        let m = FiniteModule::cokernel_of_matrix(&r, &RingMatrix::new(1, 2, vec![vec![2], vec![2]]).unwrap()).unwrap();
        let elems: Vec<_> = m.elements(1 << 10).unwrap().collect();
        assert_eq!(elems.len() as u128, m.order());
        let mut canon: Vec<_> = elems.iter().map(|e| m.reduce(e)).collect();
        canon.sort();
        canon.dedup();
        assert_eq!(canon.len(), elems.len());
    }
}
