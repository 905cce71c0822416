//! Full-rank sublattices of `Z^d` in column Hermite normal form.

use serde::Serialize;

use crate::error::{Error, Result};

/// A finite-index sublattice of `Z^d`, stored as the upper-triangular
/// column HNF `h` of its basis: `h[i][i] > 0`, `h[i][j] = 0` for `j < i`,
/// and `0 <= h[i][j] < h[i][i]` for `j > i`. The columns generate the
/// lattice.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Sublattice {
    hnf: Vec<Vec<i64>>,
}

impl Sublattice {
    /// `k Z^d`.
    pub fn diagonal(rank: usize, k: i64) -> Self {
        assert!(k > 0 && rank > 0);
        let hnf = (0..rank)
            .map(|i| (0..rank).map(|j| if i == j { k } else { 0 }).collect())
            .collect();
        Sublattice { hnf }
    }

    pub fn rank(&self) -> usize {
        self.hnf.len()
    }

    /// Row-major HNF matrix; columns are the basis.
    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.hnf
    }

    pub fn diagonal_entries(&self) -> Vec<i64> {
        (0..self.rank()).map(|i| self.hnf[i][i]).collect()
    }

    /// `|det|`, the index in `Z^d`.
    pub fn index(&self) -> usize {
        self.diagonal_entries().iter().product::<i64>() as usize
    }

    pub fn is_diagonal(&self) -> bool {
        let d = self.rank();
        (0..d).all(|i| (i + 1..d).all(|j| self.hnf[i][j] == 0))
    }

    /// Reduces `v` into the box `offset[i] <= x[i] < offset[i] + h[i][i]`
    /// by subtracting lattice vectors. Any such box is a complete set of
    /// coset representatives.
    pub fn reduce_into_box(&self, v: &[i64], offset: &[i64]) -> Vec<i64> {
        let d = self.rank();
        assert_eq!(v.len(), d, "vector rank");
        let mut x = v.to_vec();
        for i in (0..d).rev() {
            let h = self.hnf[i][i];
            let q = (x[i] - offset[i]).div_euclid(h);
            if q != 0 {
                for (r, xr) in x.iter_mut().enumerate().take(i + 1) {
                    *xr -= q * self.hnf[r][i];
                }
            }
        }
        x
    }

    pub fn reduce(&self, v: &[i64]) -> Vec<i64> {
        self.reduce_into_box(v, &vec![0; self.rank()])
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// All HNF sublattices of the given index, diagonal tuples in
    /// descending lexicographic order, off-diagonal entries ascending.
    pub fn enumerate_with_index(rank: usize, index: usize) -> Vec<Sublattice> {
        let mut diagonals = Vec::new();
        factor_tuples(index as i64, rank, &mut Vec::new(), &mut diagonals);
        diagonals.sort_by(|a, b| b.cmp(a));
        let mut out = Vec::new();
        for diag in diagonals {
            let mut slots = Vec::new();
            for i in 0..rank {
                for j in i + 1..rank {
                    slots.push((i, j, diag[i]));
                }
            }
            let mut choice = vec![0i64; slots.len()];
            loop {
                let mut hnf = vec![vec![0i64; rank]; rank];
                for i in 0..rank {
                    hnf[i][i] = diag[i];
                }
                for (s, &(i, j, _)) in slots.iter().enumerate() {
                    hnf[i][j] = choice[s];
                }
                out.push(Sublattice { hnf });
                // odometer over off-diagonal choices
                let mut k = 0;
                while k < slots.len() {
                    choice[k] += 1;
                    if choice[k] < slots[k].2 {
                        break;
                    }
                    choice[k] = 0;
                    k += 1;
                }
                if k == slots.len() {
                    break;
                }
            }
        }
        out
    }
}

fn factor_tuples(n: i64, slots: usize, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
    if slots == 1 {
        prefix.push(n);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for d in 1..=n {
        if n % d == 0 {
            prefix.push(d);
            factor_tuples(n / d, slots - 1, prefix, out);
            prefix.pop();
        }
    }
}

/// Column Hermite normal form of a square nonsingular integer matrix
/// (given row-major; its columns generate the lattice).
pub fn hermite_normal_form(basis: &[Vec<i64>]) -> Result<Sublattice> {
    let d = basis.len();
    if d == 0 || basis.iter().any(|r| r.len() != d) {
        return Err(Error::Precondition("basis must be a nonempty square matrix".into()));
    }
    let mut m: Vec<Vec<i128>> = basis
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();

    // Column operations: for row i (bottom up), gather the gcd of
    // columns 0..=i into column i and zero the rest.
    for i in (0..d).rev() {
        for j in 0..i {
            if m[i][j] == 0 {
                continue;
            }
            let (g, s, t) = ext_gcd(m[i][i], m[i][j]);
            let (a, b) = (m[i][i] / g, m[i][j] / g);
            for row in m.iter_mut() {
                let (ci, cj) = (row[i], row[j]);
                row[i] = s * ci + t * cj;
                row[j] = -b * ci + a * cj;
            }
        }
        if m[i][i] == 0 {
            return Err(Error::SingularBasis);
        }
        if m[i][i] < 0 {
            for row in m.iter_mut() {
                row[i] = -row[i];
            }
        }
    }
    for i in (0..d).rev() {
        let h = m[i][i];
        for j in i + 1..d {
            let q = m[i][j].div_euclid(h);
            if q != 0 {
                for row in m.iter_mut() {
                    row[j] -= q * row[i];
                }
            }
        }
    }
    let hnf = m
        .into_iter()
        .map(|r| {
            r.into_iter()
                .map(|x| i64::try_from(x).map_err(|_| Error::Precondition("HNF entry overflow".into())))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Sublattice { hnf })
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    // returns (g, s, t) with s*a + t*b = g >= 0
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
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
