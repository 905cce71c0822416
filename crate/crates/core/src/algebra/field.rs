//! Exact scalars: prime fields and the rationals.
//!
//! Prime-field residues carry their modulus so that values are
//! self-describing; mixing two different fields in one operation is a
//! programming error and panics.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest modulus accepted for a prime field.
pub const MAX_MODULUS: u64 = 1 << 31;

/// The base field `K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    Prime(u64),
    Rationals,
}

impl Field {
    /// The prime field of order `p`, checking primality.
    pub fn prime(p: u64) -> Result<Self> {
        if p > MAX_MODULUS || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Field::Prime(p))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Prime(p) => *p,
            Field::Rationals => 0,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Field::Prime(_))
    }

    pub fn zero(&self) -> FieldElement {
        self.from_i64(0)
    }

    pub fn one(&self) -> FieldElement {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> FieldElement {
        match *self {
            Field::Prime(p) => FieldElement::Mod {
                value: v.rem_euclid(p as i64) as u64,
                modulus: p,
            },
            Field::Rationals => FieldElement::Rat(BigRational::from_integer(BigInt::from(v))),
        }
    }

    pub fn from_bigint(&self, v: &BigInt) -> FieldElement {
        match *self {
            Field::Prime(p) => {
                let r = v.mod_floor(&BigInt::from(p));
                FieldElement::Mod {
                    value: r.to_u64().expect("residue fits"),
                    modulus: p,
                }
            }
            Field::Rationals => FieldElement::Rat(BigRational::from_integer(v.clone())),
        }
    }

    /// Embeds `num/den`; fails if `den` vanishes in the field.
    pub fn from_fraction(&self, num: &BigInt, den: &BigInt) -> Option<FieldElement> {
        match self {
            Field::Prime(_) => {
                let d = self.from_bigint(den);
                Some(&self.from_bigint(num) * &d.inv()?)
            }
            Field::Rationals => {
                if den.is_zero() {
                    None
                } else {
                    Some(FieldElement::Rat(BigRational::new(num.clone(), den.clone())))
                }
            }
        }
    }

    /// All elements in canonical order; `None` over the rationals.
    pub fn elements(&self) -> Option<Vec<FieldElement>> {
        match *self {
            Field::Prime(p) => Some(
                (0..p)
                    .map(|value| FieldElement::Mod { value, modulus: p })
                    .collect(),
            ),
            Field::Rationals => None,
        }
    }

    pub fn contains(&self, x: &FieldElement) -> bool {
        x.field() == *self
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Prime(p) => write!(f, "F_{p}"),
            Field::Rationals => write!(f, "Q"),
        }
    }
}

/// An element of `F_p` or `Q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldElement {
    Mod { value: u64, modulus: u64 },
    Rat(BigRational),
}

impl FieldElement {
    pub fn field(&self) -> Field {
        match self {
            FieldElement::Mod { modulus, .. } => Field::Prime(*modulus),
            FieldElement::Rat(_) => Field::Rationals,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElement::Mod { value, .. } => *value == 0,
            FieldElement::Rat(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldElement::Mod { value, .. } => *value == 1,
            FieldElement::Rat(r) => r.is_one(),
        }
    }

    /// The residue of a prime-field element.
    pub fn residue(&self) -> Option<u64> {
        match self {
            FieldElement::Mod { value, .. } => Some(*value),
            FieldElement::Rat(_) => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            FieldElement::Rat(r) => Some(r),
            FieldElement::Mod { .. } => None,
        }
    }

    pub fn inv(&self) -> Option<FieldElement> {
        match self {
            FieldElement::Mod { value, modulus } => {
                if *value == 0 {
                    None
                } else {
                    Some(FieldElement::Mod {
                        value: pow_mod(*value, modulus - 2, *modulus),
                        modulus: *modulus,
                    })
                }
            }
            FieldElement::Rat(r) => {
                if r.is_zero() {
                    None
                } else {
                    Some(FieldElement::Rat(r.recip()))
                }
            }
        }
    }

    pub fn pow(&self, e: u64) -> FieldElement {
        match self {
            FieldElement::Mod { value, modulus } => FieldElement::Mod {
                value: pow_mod(*value, e, *modulus),
                modulus: *modulus,
            },
            FieldElement::Rat(r) => {
                let e = i32::try_from(e).expect("exponent fits in i32");
                FieldElement::Rat(num_traits::pow::Pow::pow(r, e))
            }
        }
    }

    /// Whether the element is an integer (always true in `F_p`).
    pub fn is_integral(&self) -> bool {
        match self {
            FieldElement::Mod { .. } => true,
            FieldElement::Rat(r) => r.is_integer(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            FieldElement::Mod { .. } => false,
            FieldElement::Rat(r) => r.is_negative(),
        }
    }

    fn check_same(&self, other: &FieldElement) {
        assert_eq!(
            self.field(),
            other.field(),
            "arithmetic between elements of different fields"
        );
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElement::Mod { value, .. } => write!(f, "{value}"),
            FieldElement::Rat(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
        }
    }
}

impl<'a> Add<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &'a FieldElement) -> FieldElement {
        self.check_same(rhs);
        match (self, rhs) {
            (FieldElement::Mod { value: a, modulus }, FieldElement::Mod { value: b, .. }) => {
                FieldElement::Mod {
                    value: ((*a as u128 + *b as u128) % *modulus as u128) as u64,
                    modulus: *modulus,
                }
            }
            (FieldElement::Rat(a), FieldElement::Rat(b)) => FieldElement::Rat(a + b),
            _ => unreachable!(),
        }
    }
}

impl<'a> Sub<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &'a FieldElement) -> FieldElement {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &'a FieldElement) -> FieldElement {
        self.check_same(rhs);
        match (self, rhs) {
            (FieldElement::Mod { value: a, modulus }, FieldElement::Mod { value: b, .. }) => {
                FieldElement::Mod {
                    value: ((*a as u128 * *b as u128) % *modulus as u128) as u64,
                    modulus: *modulus,
                }
            }
            (FieldElement::Rat(a), FieldElement::Rat(b)) => FieldElement::Rat(a * b),
            _ => unreachable!(),
        }
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        match self {
            FieldElement::Mod { value, modulus } => FieldElement::Mod {
                value: (modulus - value) % modulus,
                modulus: *modulus,
            },
            FieldElement::Rat(r) => FieldElement::Rat(-r),
        }
    }
}

pub(crate) fn pow_mod(base: u64, mut e: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut b = base as u128 % m128;
    let mut acc = 1u128 % m128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        e >>= 1;
    }
    acc as u64
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_arithmetic() {
        let f5 = Field::prime(5).unwrap();
        let two = f5.from_i64(2);
        assert_eq!(two.pow(3), f5.from_i64(3));
        assert_eq!(two.inv().unwrap(), f5.from_i64(3));
        assert_eq!(-&two, f5.from_i64(3));
        assert_eq!(&two - &f5.from_i64(4), f5.from_i64(3));
        assert!(f5.zero().inv().is_none());
    }

    #[test]
    fn rejects_composite_modulus() {
        assert_eq!(Field::prime(6), Err(Error::NotPrime(6)));
        assert_eq!(Field::prime(1), Err(Error::NotPrime(1)));
    }

    #[test]
    fn rationals_stay_normalized() {
        let q = Field::Rationals;
        let a = q.from_fraction(&BigInt::from(2), &BigInt::from(-4)).unwrap();
        let r = a.as_rational().unwrap();
        assert_eq!(r.numer(), &BigInt::from(-1));
        assert_eq!(r.denom(), &BigInt::from(2));
        let b = &a * &q.from_i64(-6);
        assert_eq!(b, q.from_i64(3));
        assert_eq!(format!("{a}"), "-1/2");
    }

    #[test]
    fn fraction_in_prime_field() {
        let f7 = Field::Prime(7);
        let half = f7.from_fraction(&BigInt::from(1), &BigInt::from(2)).unwrap();
        assert_eq!(half, f7.from_i64(4));
        assert!(f7.from_fraction(&BigInt::from(1), &BigInt::from(14)).is_none());
    }
}
