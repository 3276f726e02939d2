//! Dense linear algebra over the residue ring Z/m.
//!
//! Everything downstream (ring arithmetic, module coordinates, Hom and tensor
//! constructions) reduces to row spans over Z/m. Since Z/m is not a field for
//! composite m, the canonical form used throughout is the Howell normal form:
//! an echelon basis of the row span with normalized pivots (each pivot a
//! divisor of m), entries above a pivot reduced modulo that pivot, and the
//! Howell property (every span element whose first `j` entries vanish is a
//! combination of the basis rows whose pivots lie at column `j` or later).
//!
//! Vectors are rows; matrices act on the right (`x ↦ x·A`).

use std::fmt;

use serde::{Deserialize, Serialize};
use strength_reduce::StrengthReducedU64;

use crate::error::{Error, Result};

/// Largest admissible modulus; keeps every product of two residues in a `u64`.
pub const MAX_MODULUS: u64 = 1 << 31;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Extended Euclid on signed integers: returns `(g, s, t)` with `s·a + t·b = g ≥ 0`.
pub fn xgcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i64, 0i64);
    let (mut old_t, mut t) = (0i64, 1i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inverse_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (g, s, _) = xgcd((a % m) as i64, m as i64);
    if g != 1 {
        return None;
    }
    Some(s.rem_euclid(m as i64) as u64)
}

/// Returns `(u, d)` where `d = gcd(a, m)` and `u` is a unit mod `m` with `u·a ≡ d`.
pub fn unit_normalizer(a: u64, m: u64) -> (u64, u64) {
    let a = a % m;
    if a == 0 {
        return (1, m);
    }
    if m % a == 0 {
        return (1, a);
    }
    let d = gcd(a, m);
    let q = m / d;
    let base = inverse_mod(a / d, q).unwrap_or(0) % q.max(1);
    let mut u = base;
    while gcd(u, m) != 1 {
        u += q;
    }
    (u % m, d)
}

#[inline]
fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    (a * b) % m
}

#[inline]
fn addmod(a: u64, b: u64, m: u64) -> u64 {
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

#[inline]
fn submod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + m - b
    }
}

/// `dst += c·src` over Z/m.
fn axpy(dst: &mut [u64], c: u64, src: &[u64], m: u64) {
    if c == 0 {
        return;
    }
    for (d, &s) in dst.iter_mut().zip(src) {
        *d = (*d + c * s) % m;
    }
}

/// A dense matrix over Z/m, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResidueMatrix {
    modulus: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl fmt::Debug for ResidueMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ResidueMatrix(mod {}, {}x{})[", self.modulus, self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

pub(crate) fn check_modulus(modulus: u64) -> Result<()> {
    if !(2..=MAX_MODULUS).contains(&modulus) {
        return Err(Error::InvalidModulus(modulus));
    }
    Ok(())
}

impl ResidueMatrix {
    pub fn new(modulus: u64, rows: usize, cols: usize, data: Vec<u64>) -> Result<Self> {
        check_modulus(modulus)?;
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        if let Some(bad) = data.iter().find(|&&x| x >= modulus) {
            return Err(Error::InvalidEntry { value: *bad, modulus });
        }
        Ok(Self { modulus, rows, cols, data })
    }

    /// Builds a matrix from rows, reducing every entry into `[0, modulus)`.
    pub fn from_rows<R: AsRef<[u64]>>(modulus: u64, cols: usize, rows: &[R]) -> Result<Self> {
        check_modulus(modulus)?;
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row of length {} in a matrix with {} columns",
                    r.len(),
                    cols
                )));
            }
            data.extend(r.iter().map(|x| x % modulus));
        }
        Ok(Self { modulus, rows: rows.len(), cols, data })
    }

    /// Like [`from_rows`](Self::from_rows) for signed input.
    pub fn from_signed_rows(modulus: u64, cols: usize, rows: &[Vec<i64>]) -> Result<Self> {
        let reduced: Vec<Vec<u64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| x.rem_euclid(modulus as i64) as u64).collect())
            .collect();
        Self::from_rows(modulus, cols, &reduced)
    }

    /// Rechecks shape and reduction, e.g. after deserialization.
    pub fn validate(&self) -> Result<()> {
        check_modulus(self.modulus)?;
        if self.data.len() != self.rows * self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {}x{} matrix",
                self.data.len(),
                self.rows,
                self.cols
            )));
        }
        if let Some(bad) = self.data.iter().find(|&&x| x >= self.modulus) {
            return Err(Error::InvalidEntry { value: *bad, modulus: self.modulus });
        }
        Ok(())
    }

    pub(crate) fn from_raw(modulus: u64, rows: usize, cols: usize, data: Vec<u64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { modulus, rows, cols, data }
    }

    pub fn zeros(modulus: u64, rows: usize, cols: usize) -> Self {
        Self { modulus, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(modulus: u64, n: usize) -> Self {
        let mut m = Self::zeros(modulus, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % modulus;
        }
        m
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v % self.modulus;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[u64]> + '_ {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        self.row_iter().map(|r| r.to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    fn same_modulus(&self, other: &Self) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(self.modulus, other.modulus));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_modulus(other)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let m = self.modulus;
        let mut out = vec![0u64; self.rows * other.cols];
        for i in 0..self.rows {
            let dst = &mut out[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a != 0 {
                    axpy(dst, a, other.row(k), m);
                }
            }
        }
        Ok(Self::from_raw(m, self.rows, other.cols, out))
    }

    /// Row vector times matrix.
    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.rows, "vector length does not match matrix rows");
        let mut out = vec![0u64; self.cols];
        for (k, &a) in v.iter().enumerate() {
            axpy(&mut out, a % self.modulus, self.row(k), self.modulus);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_modulus(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch("matrix sum of different shapes".into()));
        }
        let m = self.modulus;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| addmod(a, b, m)).collect();
        Ok(Self::from_raw(m, self.rows, self.cols, data))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_modulus(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch("matrix difference of different shapes".into()));
        }
        let m = self.modulus;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| submod(a, b, m)).collect();
        Ok(Self::from_raw(m, self.rows, self.cols, data))
    }

    pub fn scale(&self, c: u64) -> Self {
        let m = self.modulus;
        let c = c % m;
        Self::from_raw(m, self.rows, self.cols, self.data.iter().map(|&a| mulmod(a, c, m)).collect())
    }

    /// `self += c·other` in place.
    pub(crate) fn add_scaled(&mut self, c: u64, other: &Self) {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        axpy(&mut self.data, c % self.modulus, &other.data, self.modulus);
    }

    pub fn neg(&self) -> Self {
        let m = self.modulus;
        Self::from_raw(m, self.rows, self.cols, self.data.iter().map(|&a| submod(0, a, m)).collect())
    }

    pub fn transpose(&self) -> Self {
        let mut out = vec![0u64; self.data.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        Self::from_raw(self.modulus, self.cols, self.rows, out)
    }

    pub fn vstack(&self, other: &Self) -> Result<Self> {
        self.same_modulus(other)?;
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "vstack of {} and {} columns",
                self.cols, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Self::from_raw(self.modulus, self.rows + other.rows, self.cols, data))
    }

    pub fn hstack(&self, other: &Self) -> Result<Self> {
        self.same_modulus(other)?;
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "hstack of {} and {} rows",
                self.rows, other.rows
            )));
        }
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        Ok(Self::from_raw(self.modulus, self.rows, cols, data))
    }

    pub fn block_diag(blocks: &[&Self]) -> Result<Self> {
        let modulus = match blocks.first() {
            Some(b) => b.modulus,
            None => return Err(Error::DimensionMismatch("empty block list".into())),
        };
        let rows: usize = blocks.iter().map(|b| b.rows).sum();
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(modulus, rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            if b.modulus != modulus {
                return Err(Error::ModulusMismatch(modulus, b.modulus));
            }
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.data[(r0 + i) * cols + c0 + j] = b.get(i, j);
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        Ok(out)
    }

    /// Copies `block` into position `(r0, c0)`.
    pub(crate) fn put_block(&mut self, r0: usize, c0: usize, block: &Self) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.data[(r0 + i) * self.cols + c0 + j] = block.get(i, j);
            }
        }
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let (nr, nc) = (rows.len(), cols.len());
        let mut data = Vec::with_capacity(nr * nc);
        for i in rows {
            data.extend_from_slice(&self.row(i)[cols.clone()]);
        }
        Self::from_raw(self.modulus, nr, nc, data)
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Self::from_raw(self.modulus, idx.len(), self.cols, data)
    }

    pub fn push_row(&mut self, row: &[u64]) {
        assert_eq!(row.len(), self.cols);
        self.data.extend(row.iter().map(|x| x % self.modulus));
        self.rows += 1;
    }

    /// Howell normal form `H` together with a transform `T` such that `T·A = H`.
    pub fn howell_form(&self) -> (ResidueMatrix, ResidueMatrix) {
        let hw = howell_impl(self, true);
        let t = hw.transform.expect("transform tracked");
        (hw.basis, t)
    }

    /// Howell normal form without the transform.
    pub fn howell(&self) -> Howell {
        let hw = howell_impl(self, false);
        Howell { basis: hw.basis, pivots: hw.pivots }
    }

    /// `|row_span(A)|`.
    pub fn row_span_order(&self) -> u128 {
        self.howell().order()
    }

    /// Rows generating `{x : x·A = 0}`, in Howell form.
    pub fn kernel(&self) -> ResidueMatrix {
        let (m, n, k) = (self.modulus, self.cols, self.rows);
        let mut aug = Vec::with_capacity(k * (n + k));
        for i in 0..k {
            aug.extend_from_slice(self.row(i));
            aug.extend((0..k).map(|c| if c == i { 1 % m } else { 0 }));
        }
        let h = howell_impl(&ResidueMatrix::from_raw(m, k, n + k, aug), false);
        let mut data = Vec::new();
        let mut rows = 0;
        for (r, &(col, _)) in h.pivots.iter().enumerate() {
            if col >= n {
                data.extend_from_slice(&h.basis.row(r)[n..]);
                rows += 1;
            }
        }
        ResidueMatrix::from_raw(m, rows, k, data)
    }

    /// Some `x` with `x·A = b`, if one exists.
    pub fn solve(&self, b: &[u64]) -> Result<Option<Vec<u64>>> {
        if b.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side of length {} for {} columns",
                b.len(),
                self.cols
            )));
        }
        let m = self.modulus;
        let e = eliminate(self, true);
        let mut v: Vec<u64> = b.iter().map(|x| x % m).collect();
        let mut x = vec![0u64; self.rows];
        let mut next = 0;
        for j in 0..self.cols {
            if v[j] == 0 {
                continue;
            }
            while next < e.rank && e.pivots[next].0 < j {
                next += 1;
            }
            if next >= e.rank || e.pivots[next].0 != j || v[j] % e.pivots[next].1 != 0 {
                return Ok(None);
            }
            let q = v[j] / e.pivots[next].1;
            let row = &e.buf[next * e.width..(next + 1) * e.width];
            axpy(&mut v, m - q, &row[..self.cols], m);
            axpy(&mut x, q, &row[self.cols..], m);
        }
        Ok(Some(x))
    }

    /// `c·self`, the combination of rows with coefficients `c`.
    fn combine(&self, coeffs: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; self.cols];
        for (i, &c) in coeffs.iter().enumerate() {
            axpy(&mut out, c, self.row(i), self.modulus);
        }
        out
    }
}

fn pivots_of(h: &ResidueMatrix) -> Vec<(usize, u64)> {
    h.row_iter()
        .map(|r| {
            let j = r.iter().position(|&x| x != 0).expect("Howell rows are nonzero");
            (j, r[j])
        })
        .collect()
}

/// A Howell basis of a row span, with its pivot positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Howell {
    basis: ResidueMatrix,
    /// `(column, pivot value)` per basis row; pivot values divide the modulus.
    pivots: Vec<(usize, u64)>,
}

impl Howell {
    pub fn basis(&self) -> &ResidueMatrix {
        &self.basis
    }

    pub fn pivots(&self) -> &[(usize, u64)] {
        &self.pivots
    }

    pub fn modulus(&self) -> u64 {
        self.basis.modulus
    }

    pub fn order(&self) -> u128 {
        let m = self.basis.modulus;
        self.pivots
            .iter()
            .fold(1u128, |acc, &(_, p)| acc.saturating_mul((m / gcd(p, m)) as u128))
    }

    /// Canonical coset representative of `v` modulo the span.
    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let m = self.basis.modulus;
        let mut v: Vec<u64> = v.iter().map(|x| x % m).collect();
        for (r, &(j, p)) in self.pivots.iter().enumerate() {
            let q = v[j] / p;
            if q != 0 {
                axpy(&mut v, m - q, self.basis.row(r), m);
            }
        }
        v
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Coefficients `c` with `Σ c_i·basis_i = v`, if `v` lies in the span.
    pub fn decompose(&self, v: &[u64]) -> Option<Vec<u64>> {
        let m = self.basis.modulus;
        let mut v: Vec<u64> = v.iter().map(|x| x % m).collect();
        let mut coeffs = vec![0u64; self.pivots.len()];
        let mut next = 0;
        for j in 0..v.len() {
            if v[j] == 0 {
                continue;
            }
            while next < self.pivots.len() && self.pivots[next].0 < j {
                next += 1;
            }
            if next >= self.pivots.len() || self.pivots[next].0 != j {
                return None;
            }
            let p = self.pivots[next].1;
            if v[j] % p != 0 {
                return None;
            }
            let q = v[j] / p;
            coeffs[next] = q;
            axpy(&mut v, m - q, self.basis.row(next), m);
        }
        Some(coeffs)
    }
}

struct HowellOutput {
    basis: ResidueMatrix,
    pivots: Vec<(usize, u64)>,
    transform: Option<ResidueMatrix>,
}

/// Working rows `[entries | transform row]` after elimination; the first
/// `rank` rows form the Howell basis.
struct Elimination {
    buf: Vec<u64>,
    width: usize,
    rank: usize,
    pivots: Vec<(usize, u64)>,
}

fn eliminate(a: &ResidueMatrix, track: bool) -> Elimination {
    let m = a.modulus;
    let rm = StrengthReducedU64::new(m);
    let n = a.cols;
    let k = if track { a.rows } else { 0 };
    // each working row is [entries | transform row]
    let w = n + k;
    let mut buf = Vec::with_capacity((a.rows + n) * w);
    for i in 0..a.rows {
        buf.extend_from_slice(a.row(i));
        if track {
            buf.extend((0..k).map(|c| if c == i { 1 % m } else { 0 }));
        }
    }
    let mut count = a.rows;
    let mut pivots = Vec::with_capacity(n);
    let mut r = 0usize;
    for j in 0..n {
        if r >= count {
            break;
        }
        // fold every later row into row r at column j
        for i in r + 1..count {
            let b = buf[i * w + j];
            if b == 0 {
                continue;
            }
            let av = buf[r * w + j];
            let (g, s, t) = xgcd(av as i64, b as i64);
            let mi = m as i64;
            let s = s.rem_euclid(mi) as u64;
            let t = t.rem_euclid(mi) as u64;
            let u = ((-(b as i64) / g).rem_euclid(mi)) as u64;
            let v = ((av as i64 / g).rem_euclid(mi)) as u64;
            let (head, tail) = buf.split_at_mut(i * w);
            let ra = &mut head[r * w..(r + 1) * w];
            let rb = &mut tail[..w];
            for (x, y) in ra[j..].iter_mut().zip(rb[j..].iter_mut()) {
                let nx = (s * *x + t * *y) % rm;
                let ny = (u * *x + v * *y) % rm;
                *x = nx;
                *y = ny;
            }
        }
        let a_rj = buf[r * w + j];
        if a_rj == 0 {
            continue;
        }
        let (unit, d) = unit_normalizer(a_rj, m);
        if unit != 1 {
            for x in buf[r * w + j..(r + 1) * w].iter_mut() {
                *x = mulmod(*x, unit, m);
            }
        }
        debug_assert_eq!(buf[r * w + j], d);
        for i in 0..r {
            let q = buf[i * w + j] / d;
            if q != 0 {
                let (head, tail) = buf.split_at_mut(r * w);
                axpy(&mut head[i * w + j..(i + 1) * w], m - q, &tail[j..w], m);
            }
        }
        if d != 1 {
            let s = m / d;
            let start = buf.len();
            for c in 0..w {
                let x = buf[r * w + c];
                buf.push(mulmod(x, s, m));
            }
            if buf[start..start + n].iter().any(|&x| x != 0) {
                count += 1;
            } else {
                buf.truncate(start);
            }
        }
        pivots.push((j, d));
        r += 1;
    }
    Elimination { buf, width: w, rank: r, pivots }
}

fn howell_impl(a: &ResidueMatrix, track: bool) -> HowellOutput {
    let (m, n) = (a.modulus, a.cols);
    let Elimination { mut buf, width: w, rank: r, pivots } = eliminate(a, track);
    if !track {
        buf.truncate(r * n);
        return HowellOutput { basis: ResidueMatrix::from_raw(m, r, n, buf), pivots, transform: None };
    }
    let mut basis = Vec::with_capacity(r * n);
    let mut trans = Vec::with_capacity(r * a.rows);
    for row in buf.chunks(w.max(1)).take(r) {
        basis.extend_from_slice(&row[..n]);
        trans.extend_from_slice(&row[n..]);
    }
    HowellOutput {
        basis: ResidueMatrix::from_raw(m, r, n, basis),
        pivots,
        transform: Some(ResidueMatrix::from_raw(m, r, a.rows, trans)),
    }
}

/// `{x : x·C ∈ row_span(L)}` as generating rows.
pub fn preimage_of_span(c: &ResidueMatrix, l: &ResidueMatrix) -> Result<ResidueMatrix> {
    let stacked = c.vstack(l)?;
    let k = stacked.kernel();
    Ok(k.submatrix(0..k.rows(), 0..c.rows()).howell().basis)
}

/// Some `x` with `x·A ≡ b` modulo `row_span(L)`.
pub fn solve_modulo(a: &ResidueMatrix, b: &[u64], l: &ResidueMatrix) -> Result<Option<Vec<u64>>> {
    let stacked = a.vstack(l)?;
    Ok(stacked.solve(b)?.map(|x| x[..a.rows()].to_vec()))
}

/// Solves `X·A ≡ B` row by row modulo `row_span(L)`.
pub fn solve_rows_modulo(
    a: &ResidueMatrix,
    b: &ResidueMatrix,
    l: &ResidueMatrix,
) -> Result<Option<ResidueMatrix>> {
    let stacked = a.vstack(l)?;
    let (h, t) = stacked.howell_form();
    let hw = Howell { pivots: pivots_of(&h), basis: h };
    let mut out = ResidueMatrix::zeros(a.modulus, b.rows(), a.rows());
    for i in 0..b.rows() {
        match hw.decompose(b.row(i)) {
            Some(c) => {
                let x = t.combine(&c);
                out.row_mut(i).copy_from_slice(&x[..a.rows()]);
            }
            None => return Ok(None),
        }
    }
    Ok(Some(out))
}
