//! Sparse multivariate polynomials over a [`Field`].

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use super::field::{Field, FieldElement};
use crate::error::{Error, Result};

/// An exponent vector, ordered graded-lexicographically.
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

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in `nvars` variables. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    field: Field,
    nvars: usize,
    terms: BTreeMap<Monomial, FieldElement>,
}

impl MultiPoly {
    pub fn zero(field: Field, nvars: usize) -> Self {
        MultiPoly {
            field,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: Field, nvars: usize, c: FieldElement) -> Self {
        let mut p = Self::zero(field, nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    pub fn var(field: Field, nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        let mut p = Self::zero(field, nvars);
        p.add_term(Monomial::var(nvars, i), field.one());
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs; like
    /// terms are combined.
    pub fn from_terms<I>(field: Field, nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, FieldElement)>,
    {
        let mut p = Self::zero(field, nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            p.add_term(Monomial(e), c);
        }
        p
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in descending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &FieldElement)> {
        self.terms.iter().rev()
    }

    pub fn coefficient(&self, m: &Monomial) -> FieldElement {
        self.terms.get(m).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    /// Constant value if the polynomial has no variable occurrences.
    pub fn as_constant(&self) -> Option<FieldElement> {
        match self.terms.len() {
            0 => Some(self.field.zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                (m.degree() == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Indices of the variables that occur with nonzero exponent.
    pub fn variables_used(&self) -> Vec<usize> {
        let mut used = vec![false; self.nvars];
        for m in self.terms.keys() {
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    used[i] = true;
                }
            }
        }
        (0..self.nvars).filter(|&i| used[i]).collect()
    }

    fn add_term(&mut self, m: Monomial, c: FieldElement) {
        assert_eq!(c.field(), self.field, "coefficient field");
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let sum = &*existing + &c;
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn check_compatible(&self, other: &MultiPoly) {
        assert_eq!(self.field, other.field, "polynomial field mismatch");
        assert_eq!(self.nvars, other.nvars, "polynomial variable count mismatch");
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        self.check_compatible(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            field: self.field,
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        self.check_compatible(other);
        let mut out = MultiPoly::zero(self.field, self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &FieldElement) -> MultiPoly {
        let mut out = MultiPoly::zero(self.field, self.nvars);
        for (m, a) in &self.terms {
            out.add_term(m.clone(), a * c);
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> MultiPoly {
        let mut base = self.clone();
        let mut acc = MultiPoly::constant(self.field, self.nvars, self.field.one());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Exact evaluation at a point.
    pub fn eval(&self, point: &[FieldElement]) -> Result<FieldElement> {
        if point.len() != self.nvars {
            return Err(Error::Arity {
                expected: self.nvars,
                got: point.len(),
            });
        }
        if let Some(x) = point.iter().find(|x| x.field() != self.field) {
            return Err(Error::FieldMismatch(format!(
                "evaluating a polynomial over {} at a value in {}",
                self.field,
                x.field()
            )));
        }
        let mut acc = self.field.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t = &t * &x.pow(e as u64);
                }
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// Substitutes `assignment[i]` for variable `i`. All assigned
    /// polynomials must share a field and variable count.
    pub fn substitute(&self, assignment: &[MultiPoly]) -> Result<MultiPoly> {
        if assignment.len() < self.nvars {
            return Err(Error::MissingAssignment(assignment.len()));
        }
        if assignment.len() > self.nvars {
            return Err(Error::Arity {
                expected: self.nvars,
                got: assignment.len(),
            });
        }
        let target_nvars = match assignment.first() {
            Some(p) => p.nvars,
            None => 0,
        };
        for a in assignment {
            if a.field != self.field || a.nvars != target_nvars {
                return Err(Error::FieldMismatch(
                    "substituted polynomials disagree on field or variable count".into(),
                ));
            }
        }
        // Cache powers per variable; composition bodies reuse them heavily.
        let mut powers: Vec<Vec<MultiPoly>> = assignment
            .iter()
            .map(|a| vec![MultiPoly::constant(self.field, target_nvars, self.field.one()), a.clone()])
            .collect();
        let mut out = MultiPoly::zero(self.field, target_nvars);
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(self.field, target_nvars, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let cache = &mut powers[i];
                while cache.len() <= e as usize {
                    let next = cache.last().unwrap().mul(&cache[1]);
                    cache.push(next);
                }
                t = t.mul(&cache[e as usize]);
            }
            out = out.add(&t);
        }
        Ok(out)
    }

    /// Reduces exponents with `x^p = x`, which preserves the induced
    /// function on `F_p`-points. The identity over the rationals.
    pub fn reduce_as_function(&self) -> MultiPoly {
        let p = match self.field {
            Field::Prime(p) => p as u32,
            Field::Rationals => return self.clone(),
        };
        let mut out = MultiPoly::zero(self.field, self.nvars);
        for (m, c) in &self.terms {
            let e = m
                .0
                .iter()
                .map(|&e| if e >= p { (e - 1) % (p - 1) + 1 } else { e })
                .collect();
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Re-indexes variables: old variable `i` becomes `map[i]` in a
    /// polynomial with `nvars` variables.
    pub fn remap_variables(&self, map: &[usize], nvars: usize) -> MultiPoly {
        assert_eq!(map.len(), self.nvars, "variable map length");
        let mut out = MultiPoly::zero(self.field, nvars);
        for (m, c) in &self.terms {
            let mut e = vec![0u32; nvars];
            for (i, &k) in m.0.iter().enumerate() {
                if k > 0 {
                    e[map[i]] += k;
                }
            }
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Renders with the supplied variable names.
    pub fn display_with<F>(&self, name: F) -> String
    where
        F: Fn(usize) -> String,
    {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (k, (m, c)) in self.terms().enumerate() {
            let negative = c.is_negative();
            let mag = if negative { -c } else { c.clone() };
            if k == 0 {
                if negative {
                    s.push('-');
                }
            } else {
                s.push_str(if negative { " - " } else { " + " });
            }
            let factors: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        name(i)
                    } else {
                        format!("{}^{}", name(i), e)
                    }
                })
                .collect();
            if factors.is_empty() {
                s.push_str(&mag.to_string());
            } else {
                if !mag.is_one() {
                    s.push_str(&mag.to_string());
                    s.push('*');
                }
                s.push_str(&factors.join("*"));
            }
        }
        s
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(|i| format!("v{i}")))
    }
}
