//! Howell forms, kernels and solving against brute-force enumeration of
//! small matrices over Z/m.

use std::collections::HashMap;

use sgmod::ResidueMatrix;

/// Vectors of `(Z/m)^c` indexed in base `m`, with an addition table.
struct Space {
    m: u64,
    c: usize,
    size: usize,
    add: Vec<u32>,
}

impl Space {
    fn new(m: u64, c: usize) -> Self {
        let size = (m as usize).pow(c as u32);
        let mut add = vec![0u32; size * size];
        for a in 0..size {
            let va = Self::decode_with(m, c, a);
            for b in 0..size {
                let vb = Self::decode_with(m, c, b);
                let s: Vec<u64> = va.iter().zip(&vb).map(|(x, y)| (x + y) % m).collect();
                add[a * size + b] = Self::encode_with(m, &s) as u32;
            }
        }
        Self { m, c, size, add }
    }

    fn decode_with(m: u64, c: usize, mut i: usize) -> Vec<u64> {
        let mut v = vec![0; c];
        for x in v.iter_mut() {
            *x = (i % m as usize) as u64;
            i /= m as usize;
        }
        v
    }

    fn encode_with(m: u64, v: &[u64]) -> usize {
        v.iter().rev().fold(0, |acc, &x| acc * m as usize + (x % m) as usize)
    }

    fn decode(&self, i: usize) -> Vec<u64> {
        Self::decode_with(self.m, self.c, i)
    }

    fn encode(&self, v: &[u64]) -> usize {
        Self::encode_with(self.m, v)
    }

    fn plus(&self, a: usize, b: usize) -> usize {
        self.add[a * self.size + b] as usize
    }
}

/// Span membership as a bitset, and the number of `x` with `x·A = 0`.
fn brute_span(space: &Space, rows: &[usize], sums: &mut Vec<usize>, next: &mut Vec<usize>) -> ([u64; 4], u64) {
    sums.clear();
    sums.push(0);
    for &r in rows {
        next.clear();
        for &s in sums.iter() {
            let mut a = s;
            for _ in 0..space.m {
                next.push(a);
                a = space.plus(a, r);
            }
        }
        std::mem::swap(sums, next);
    }
    let mut member = [0u64; 4];
    let mut zeros = 0u64;
    for &v in sums.iter() {
        member[v / 64] |= 1 << (v % 64);
        zeros += (v == 0) as u64;
    }
    (member, zeros)
}

fn has(member: &[u64; 4], v: usize) -> bool {
    member[v / 64] >> (v % 64) & 1 == 1
}

/// Position of the `n`-th set bit.
fn select(bits: &[u64; 4], mut n: u32) -> usize {
    for (w, &word) in bits.iter().enumerate() {
        let c = word.count_ones();
        if n < c {
            let mut x = word;
            for _ in 0..n {
                x &= x - 1;
            }
            return w * 64 + x.trailing_zeros() as usize;
        }
        n -= c;
    }
    unreachable!("fewer set bits than requested")
}

pub fn check_shape(m: u64, r: usize, c: usize) -> usize {
    let space = Space::new(m, c);
    let vectors: Vec<Vec<u64>> = (0..space.size).map(|i| space.decode(i)).collect();
    let total = space.size.pow(r as u32);
    let mut canonical: HashMap<[u64; 4], ResidueMatrix> = HashMap::new();
    let mut rows = vec![0usize; r];
    let mut data = Vec::with_capacity(r * c);
    let (mut sums, mut next) = (Vec::new(), Vec::new());
    for idx in 0..total {
        let mut rest = idx;
        data.clear();
        for slot in rows.iter_mut() {
            *slot = rest % space.size;
            rest /= space.size;
            data.extend_from_slice(&vectors[*slot]);
        }
        let a = ResidueMatrix::new(m, r, c, data.clone()).unwrap();
        let (member, zero_combos) = brute_span(&space, &rows, &mut sums, &mut next);
        let span_size: u32 = member.iter().map(|w| w.count_ones()).sum();

        let hw = a.howell();
        assert_eq!(hw.order(), span_size as u128, "{a:?}");
        match canonical.get(&member) {
            Some(h) => assert_eq!(h, hw.basis(), "two forms for one span: {a:?}"),
            None => {
                for (row, &(_, p)) in hw.basis().row_iter().zip(hw.pivots()) {
                    assert!(has(&member, space.encode(row)), "{a:?}");
                    assert_eq!(m % p, 0, "pivot {p} does not divide {m}");
                }
                for (v, vec) in vectors.iter().enumerate() {
                    assert_eq!(hw.contains(vec), has(&member, v), "{a:?}");
                }
                let (h, t) = a.howell_form();
                assert_eq!(&t.mul(&a).unwrap(), hw.basis());
                assert_eq!(&h, hw.basis());
                canonical.insert(member, hw.basis().clone());
            }
        }

        // kernel rows come in Howell form, so pivots give the order directly
        let ker = a.kernel();
        let mut ker_order = 1u64;
        for x in ker.row_iter() {
            assert!(a.apply(x).iter().all(|&v| v == 0), "{a:?}");
            let p = *x.iter().find(|&&v| v != 0).expect("nonzero kernel row");
            assert_eq!(m % p, 0, "{a:?}");
            ker_order *= m / p;
        }
        assert_eq!(ker_order, zero_combos, "{a:?}");

        // alternately a target inside the span and one outside it
        let mut missing = [0u64; 4];
        for v in 0..space.size {
            missing[v / 64] |= 1 << (v % 64);
        }
        for (x, y) in missing.iter_mut().zip(&member) {
            *x &= !y;
        }
        let gaps: u32 = missing.iter().map(|w| w.count_ones()).sum();
        if idx % 2 == 0 || gaps == 0 {
            let b = &vectors[select(&member, (idx / 2) as u32 % span_size)];
            let x = a.solve(b).unwrap().expect("target lies in the span");
            assert_eq!(&a.apply(&x), b, "{a:?}");
        } else {
            let b = &vectors[select(&missing, (idx / 2) as u32 % gaps)];
            assert_eq!(a.solve(b).unwrap(), None, "{a:?}");
        }
    }
    total
}

/// Checks every matrix with modulus `2..=6` and `1..=3` rows and columns
/// accepted by `filter(m, rows, cols)`; returns how many were checked.
pub fn check_all(filter: impl Fn(u64, usize, usize) -> bool) -> usize {
    let mut count = 0;
    for m in 2..=6 {
        for r in 1..=3 {
            for c in 1..=3 {
                if filter(m, r, c) {
                    count += check_shape(m, r, c);
                }
            }
        }
    }
    count
}
