//! Quotient dimensions of polynomial ideals by linear algebra alone.
//!
//! For a zero-dimensional ideal `I = (g_1, …, g_s)` and a large enough
//! degree bound `D`, `dim F_p[x]/I = #{monomials of degree ≤ D} − rank M_D`,
//! where the Macaulay matrix `M_D` holds every product `m·g_i` of degree at
//! most `D`.

use sgmod::ResidueMatrix;

/// Generator terms as `(exponents, coefficient)`.
pub type Generator<'a> = &'a [(&'a [u32], i64)];

/// The ideals exercised by the Gröbner tests: `(p, variables, generators, dimension)`.
pub fn fixtures() -> Vec<(u64, Vec<&'static str>, Vec<Generator<'static>>, usize)> {
    vec![
        (2, vec!["x"], vec![&[(&[2], 1)]], 2),
        (2, vec!["x"], vec![&[(&[4], 1)]], 4),
        (2, vec!["x", "y"], vec![&[(&[2, 0], 1)], &[(&[0, 2], 1)]], 4),
        (2, vec!["x", "y"], vec![&[(&[2, 0], 1)], &[(&[1, 1], 1)], &[(&[0, 2], 1)]], 3),
        (2, vec!["x", "y"], vec![&[(&[2, 0], 1), (&[0, 1], 1)], &[(&[0, 2], 1)]], 4),
        (3, vec!["x"], vec![&[(&[3], 1), (&[0], -1)]], 3),
        (3, vec!["x", "y"], vec![&[(&[2, 0], 1), (&[0, 0], -1)], &[(&[0, 2], 1), (&[1, 0], -1)]], 4),
        (5, vec!["x", "y", "z"], vec![&[(&[2, 0, 0], 1)], &[(&[0, 2, 0], 1)], &[(&[0, 0, 2], 1)], &[(&[1, 1, 1], 1)]], 7),
    ]
}

fn monomials(nvars: usize, deg: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..nvars {
        out = out
            .into_iter()
            .flat_map(|e: Vec<u32>| (0..=deg).map(move |d| [e.clone(), vec![d]].concat()))
            .collect();
    }
    out.retain(|e| e.iter().sum::<u32>() <= deg);
    out.sort();
    out
}

pub fn quotient_dimension(p: u64, nvars: usize, gens: &[Generator], deg: u32) -> usize {
    let basis = monomials(nvars, deg);
    let index = |e: &[u32]| basis.binary_search_by(|b| b.as_slice().cmp(e)).expect("monomial within bound");
    let mut rows = Vec::new();
    for g in gens {
        let gdeg = g.iter().map(|(e, _)| e.iter().sum::<u32>()).max().unwrap_or(0);
        for m in basis.iter().filter(|m| m.iter().sum::<u32>() + gdeg <= deg) {
            let mut row = vec![0u64; basis.len()];
            for (e, c) in g.iter() {
                let prod: Vec<u32> = e.iter().zip(m).map(|(a, b)| a + b).collect();
                let slot = &mut row[index(&prod)];
                *slot = (*slot + c.rem_euclid(p as i64) as u64) % p;
            }
            rows.push(row);
        }
    }
    let rank = ResidueMatrix::from_rows(p, basis.len(), &rows).unwrap().howell().basis().rows();
    basis.len() - rank
}
