//! Exact Gaussian elimination over a [`Field`].

use super::field::{Field, FieldElement};
use crate::error::{Error, Result};

/// `matrix · x = rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSystem {
    field: Field,
    ncols: usize,
    matrix: Vec<Vec<FieldElement>>,
    rhs: Vec<FieldElement>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearSolution {
    /// Row `row` of the reduced system reads `0 = nonzero`.
    Inconsistent { row: usize },
    /// Particular solution (free variables set to zero) and a basis of
    /// the kernel.
    Solved {
        particular: Vec<FieldElement>,
        kernel: Vec<Vec<FieldElement>>,
    },
}

impl LinearSolution {
    pub fn is_consistent(&self) -> bool {
        matches!(self, LinearSolution::Solved { .. })
    }
}

impl LinearSystem {
    pub fn new(
        field: Field,
        ncols: usize,
        matrix: Vec<Vec<FieldElement>>,
        rhs: Vec<FieldElement>,
    ) -> Result<Self> {
        if matrix.len() != rhs.len() {
            return Err(Error::Arity {
                expected: matrix.len(),
                got: rhs.len(),
            });
        }
        for row in &matrix {
            if row.len() != ncols {
                return Err(Error::Arity {
                    expected: ncols,
                    got: row.len(),
                });
            }
        }
        let all = matrix.iter().flatten().chain(&rhs);
        if all.into_iter().any(|x| x.field() != field) {
            return Err(Error::FieldMismatch("linear system entries".into()));
        }
        Ok(LinearSystem {
            field,
            ncols,
            matrix,
            rhs,
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn nrows(&self) -> usize {
        self.matrix.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// `matrix · x`.
    pub fn apply(&self, x: &[FieldElement]) -> Vec<FieldElement> {
        self.matrix
            .iter()
            .map(|row| {
                row.iter()
                    .zip(x)
                    .fold(self.field.zero(), |acc, (a, b)| &acc + &(a * b))
            })
            .collect()
    }

    pub fn rhs(&self) -> &[FieldElement] {
        &self.rhs
    }
}

/// Reduces to row echelon form and reads off a solution.
pub fn solve_linear(sys: &LinearSystem) -> LinearSolution {
    let field = sys.field;
    let n = sys.ncols;
    let mut rows: Vec<Vec<FieldElement>> = sys
        .matrix
        .iter()
        .zip(&sys.rhs)
        .map(|(r, b)| {
            let mut r = r.clone();
            r.push(b.clone());
            r
        })
        .collect();

    let mut pivots: Vec<usize> = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        let Some(pr) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pr);
        let inv = rows[rank][col].inv().unwrap();
        for x in rows[rank].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row).skip(col) {
                *x = &*x - &(&factor * p);
            }
        }
        pivots.push(col);
        rank += 1;
    }

    if let Some(row) = (rank..rows.len()).find(|&r| !rows[r][n].is_zero()) {
        return LinearSolution::Inconsistent { row };
    }

    let mut particular = vec![field.zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        particular[c] = rows[r][n].clone();
    }
    let mut is_pivot = vec![false; n];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let kernel = (0..n)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![field.zero(); n];
            v[free] = field.one();
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = -&rows[r][free];
            }
            v
        })
        .collect();
    LinearSolution::Solved { particular, kernel }
}
