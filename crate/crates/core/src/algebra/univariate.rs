//! Dense univariate polynomials and exact rational root finding.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::field::{Field, FieldElement};
use crate::error::{Error, Result};

/// `coeffs[i]` is the coefficient of `t^i`. Trailing zeros are trimmed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly {
    field: Field,
    coeffs: Vec<FieldElement>,
}

impl UniPoly {
    pub fn new(field: Field, mut coeffs: Vec<FieldElement>) -> Self {
        assert!(coeffs.iter().all(|c| c.field() == field), "coefficient field");
        while coeffs.last().is_some_and(FieldElement::is_zero) {
            coeffs.pop();
        }
        UniPoly { field, coeffs }
    }

    pub fn from_i64(field: Field, coeffs: &[i64]) -> Self {
        Self::new(field, coeffs.iter().map(|&c| field.from_i64(c)).collect())
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    /// Horner evaluation.
    pub fn eval(&self, t: &FieldElement) -> FieldElement {
        self.coeffs
            .iter()
            .rev()
            .fold(self.field.zero(), |acc, c| &(&acc * t) + c)
    }
}

/// Exactly the rational roots of `p`, sorted ascending.
///
/// Clears denominators, strips the factor `t^k`, then tests every
/// candidate `±a/b` with `a | a_0` and `b | a_n`.
pub fn rational_roots(p: &UniPoly) -> Result<Vec<FieldElement>> {
    if p.field != Field::Rationals {
        return Err(Error::FieldMismatch("rational_roots needs a polynomial over Q".into()));
    }
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let rats: Vec<&BigRational> = p.coeffs.iter().map(|c| c.as_rational().unwrap()).collect();
    let lcm = rats
        .iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let ints: Vec<BigInt> = rats
        .iter()
        .map(|r| (r.numer() * &lcm) / r.denom())
        .collect();

    let mut roots: Vec<BigRational> = Vec::new();
    let low = ints.iter().position(|c| !c.is_zero()).unwrap();
    if low > 0 {
        roots.push(BigRational::zero());
    }
    let ints = &ints[low..];
    if ints.len() > 1 {
        let a0 = ints[0].abs();
        let an = ints[ints.len() - 1].abs();
        let nums = divisors(&a0)?;
        let dens = divisors(&an)?;
        for a in &nums {
            for b in &dens {
                if !a.gcd(b).is_one() {
                    continue;
                }
                for sign in [1i32, -1] {
                    let cand = BigRational::new(a * BigInt::from(sign), b.clone());
                    let v = ints.iter().rev().fold(BigRational::zero(), |acc, c| {
                        acc * &cand + BigRational::from_integer(c.clone())
                    });
                    if v.is_zero() {
                        roots.push(cand);
                    }
                }
            }
        }
    }
    roots.sort();
    roots.dedup();
    Ok(roots.into_iter().map(FieldElement::Rat).collect())
}

fn divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let n = n.to_u64().ok_or(Error::CoefficientTooLarge)?;
    if n > 1 << 50 {
        return Err(Error::CoefficientTooLarge);
    }
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(BigInt::from(d));
            if d * d != n {
                out.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    Ok(out)
}
