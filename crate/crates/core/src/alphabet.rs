//! Alphabets `A = X(K)` and regular maps `A^M -> A`.
//!
//! Three backends: the `F_p`-points of an affine variety (enumerated),
//! an opaque finite symbol table, and an affine variety over `Q` whose
//! points are tested by evaluating its equations.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::algebra::{Field, FieldElement, MultiPoly};
use crate::error::{Error, Result};

/// Default cap on candidate tuples examined while enumerating points.
pub const ENUMERATION_CAP: u128 = 1_000_000;

/// Cap on the size of a materialized local rule table `|A|^|M|`.
pub const TABLE_CAP: u128 = 1 << 22;

/// A point of an alphabet.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Point {
    Coords(Vec<FieldElement>),
    Symbol(usize),
}

impl Point {
    pub fn coords(&self) -> Option<&[FieldElement]> {
        match self {
            Point::Coords(c) => Some(c),
            Point::Symbol(_) => None,
        }
    }
}

/// The `F_p`-points of `V(equations) ⊂ A^dim`, listed lexicographically.
#[derive(Clone, Debug)]
pub struct EnumeratedVariety {
    field: Field,
    dim: usize,
    equations: Vec<MultiPoly>,
    points: Vec<Vec<u64>>,
    index: HashMap<Vec<u64>, usize>,
}

#[derive(Clone, Debug)]
pub struct TableAlphabet {
    symbols: Vec<String>,
    index: HashMap<String, usize>,
}

/// An affine variety over `Q`; points are not enumerable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalVariety {
    dim: usize,
    equations: Vec<MultiPoly>,
}

#[derive(Clone, Debug)]
pub enum Alphabet {
    Variety(EnumeratedVariety),
    Table(TableAlphabet),
    RationalAffine(RationalVariety),
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Alphabet::Variety(a), Alphabet::Variety(b)) => {
                a.field == b.field && a.dim == b.dim && a.points == b.points
            }
            (Alphabet::Table(a), Alphabet::Table(b)) => a.symbols == b.symbols,
            (Alphabet::RationalAffine(a), Alphabet::RationalAffine(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Alphabet {}

/// Enumerates `{a ∈ F_p^n : e(a) = 0 for all e ∈ eqs}`.
pub fn enumerate_points(p: u64, n: usize, eqs: Vec<MultiPoly>, cap: u128) -> Result<Alphabet> {
    let field = Field::prime(p)?;
    for e in &eqs {
        if e.field() != field || e.nvars() != n {
            return Err(Error::FieldMismatch(format!(
                "equation must be a polynomial over {field} in {n} variables"
            )));
        }
    }
    let needed = (p as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if needed > cap {
        return Err(Error::CapExceeded { needed, cap });
    }
    let mut points = Vec::new();
    let mut tuple = vec![0u64; n];
    let elems: Vec<FieldElement> = field.elements().unwrap();
    for _ in 0..needed {
        let pt: Vec<FieldElement> = tuple.iter().map(|&t| elems[t as usize].clone()).collect();
        let on = eqs.iter().all(|e| e.eval(&pt).map(|v| v.is_zero()).unwrap_or(false));
        if on {
            points.push(tuple.clone());
        }
        // lexicographic successor, last coordinate fastest
        for d in (0..n).rev() {
            tuple[d] += 1;
            if tuple[d] < p {
                break;
            }
            tuple[d] = 0;
        }
    }
    let index = points.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
    Ok(Alphabet::Variety(EnumeratedVariety {
        field,
        dim: n,
        equations: eqs,
        points,
        index,
    }))
}

impl Alphabet {
    /// The affine space `F_p^n`.
    pub fn affine(p: u64, n: usize) -> Result<Alphabet> {
        enumerate_points(p, n, Vec::new(), ENUMERATION_CAP)
    }

    pub fn table<S: Into<String>>(symbols: Vec<S>) -> Result<Alphabet> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        let mut index = HashMap::new();
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() || s.chars().any(|c| c.is_whitespace()) {
                return Err(Error::Precondition(format!("bad symbol {s:?}")));
            }
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::Precondition(format!("duplicate symbol {s}")));
            }
        }
        if symbols.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        Ok(Alphabet::Table(TableAlphabet { symbols, index }))
    }

    pub fn rational(dim: usize, equations: Vec<MultiPoly>) -> Result<Alphabet> {
        for e in &equations {
            if e.field() != Field::Rationals || e.nvars() != dim {
                return Err(Error::FieldMismatch(format!(
                    "equation must be a polynomial over Q in {dim} variables"
                )));
            }
        }
        Ok(Alphabet::RationalAffine(RationalVariety { dim, equations }))
    }

    /// The base field; `None` for table alphabets.
    pub fn field(&self) -> Option<Field> {
        match self {
            Alphabet::Variety(v) => Some(v.field),
            Alphabet::Table(_) => None,
            Alphabet::RationalAffine(_) => Some(Field::Rationals),
        }
    }

    /// Ambient dimension of variety backends (0 for tables).
    pub fn dim(&self) -> usize {
        match self {
            Alphabet::Variety(v) => v.dim,
            Alphabet::Table(_) => 0,
            Alphabet::RationalAffine(r) => r.dim,
        }
    }

    pub fn equations(&self) -> &[MultiPoly] {
        match self {
            Alphabet::Variety(v) => &v.equations,
            Alphabet::Table(_) => &[],
            Alphabet::RationalAffine(r) => &r.equations,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.size().is_some()
    }

    pub fn size(&self) -> Option<usize> {
        match self {
            Alphabet::Variety(v) => Some(v.points.len()),
            Alphabet::Table(t) => Some(t.symbols.len()),
            Alphabet::RationalAffine(_) => None,
        }
    }

    pub fn symbols(&self) -> Option<&[String]> {
        match self {
            Alphabet::Table(t) => Some(&t.symbols),
            _ => None,
        }
    }

    /// The `i`-th point of a finite alphabet.
    pub fn point(&self, i: usize) -> Point {
        match self {
            Alphabet::Variety(v) => Point::Coords(
                v.points[i]
                    .iter()
                    .map(|&c| v.field.from_i64(c as i64))
                    .collect(),
            ),
            Alphabet::Table(_) => Point::Symbol(i),
            Alphabet::RationalAffine(_) => panic!("rational alphabets are not enumerable"),
        }
    }

    pub fn index_of(&self, p: &Point) -> Option<usize> {
        match (self, p) {
            (Alphabet::Variety(v), Point::Coords(c)) => {
                if c.len() != v.dim || c.iter().any(|x| x.field() != v.field) {
                    return None;
                }
                let key: Vec<u64> = c.iter().map(|x| x.residue().unwrap()).collect();
                v.index.get(&key).copied()
            }
            (Alphabet::Table(t), Point::Symbol(i)) => (*i < t.symbols.len()).then_some(*i),
            _ => None,
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        match (self, p) {
            (Alphabet::RationalAffine(r), Point::Coords(c)) => {
                c.len() == r.dim
                    && c.iter().all(|x| x.field() == Field::Rationals)
                    && r.equations
                        .iter()
                        .all(|e| e.eval(c).map(|v| v.is_zero()).unwrap_or(false))
            }
            _ => self.index_of(p).is_some(),
        }
    }

    /// Parses `3`, `(1,2)`, `-1/2` or a table symbol.
    pub fn parse_point(&self, text: &str) -> Result<Point> {
        let text = text.trim();
        let p = match self {
            Alphabet::Table(t) => t
                .index
                .get(text)
                .map(|&i| Point::Symbol(i))
                .ok_or_else(|| Error::NotAPoint(text.to_string()))?,
            _ => {
                let field = self.field().unwrap();
                let inner = text
                    .strip_prefix('(')
                    .and_then(|s| s.strip_suffix(')'))
                    .unwrap_or(text);
                let coords = inner
                    .split(',')
                    .map(|s| parse_scalar(s.trim(), field))
                    .collect::<Result<Vec<_>>>()?;
                Point::Coords(coords)
            }
        };
        if !self.contains(&p) {
            return Err(Error::NotAPoint(text.to_string()));
        }
        Ok(p)
    }

    pub fn format_point(&self, p: &Point) -> String {
        match (self, p) {
            (Alphabet::Table(t), Point::Symbol(i)) => t.symbols[*i].clone(),
            (_, Point::Coords(c)) if c.len() == 1 => c[0].to_string(),
            (_, Point::Coords(c)) => {
                let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                format!("({})", parts.join(","))
            }
            (_, Point::Symbol(i)) => format!("#{i}"),
        }
    }
}

fn parse_scalar(s: &str, field: Field) -> Result<FieldElement> {
    let bad = || Error::NotAPoint(s.to_string());
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, d),
        None => (body, "1"),
    };
    let num: num_bigint::BigInt = num.parse().map_err(|_| bad())?;
    let den: num_bigint::BigInt = den.parse().map_err(|_| bad())?;
    let v = field.from_fraction(&num, &den).ok_or_else(bad)?;
    Ok(if neg { -&v } else { v })
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alphabet::Variety(v) => write!(
                f,
                "{} points of a variety in F_{}^{} ({} equations)",
                v.points.len(),
                v.field.characteristic(),
                v.dim,
                v.equations.len()
            ),
            Alphabet::Table(t) => write!(f, "table alphabet {{{}}}", t.symbols.join(" ")),
            Alphabet::RationalAffine(r) => write!(
                f,
                "Q-points of a variety in Q^{} ({} equations)",
                r.dim,
                r.equations.len()
            ),
        }
    }
}

/// Little-endian mixed-radix code of a tuple of point indices.
pub fn encode_tuple(tuple: &[usize], base: usize) -> usize {
    tuple.iter().rev().fold(0, |acc, &a| acc * base + a)
}

pub fn decode_tuple(mut code: usize, base: usize, out: &mut [usize]) {
    for slot in out.iter_mut() {
        *slot = code % base;
        code /= base;
    }
}

/// `|A|^arity`, checked against `cap`.
pub fn tuple_count(base: usize, arity: usize, cap: u128) -> Result<usize> {
    let needed = (base as u128).checked_pow(arity as u32).unwrap_or(u128::MAX);
    if needed > cap {
        return Err(Error::CapExceeded { needed, cap });
    }
    Ok(needed as usize)
}

/// How the codomain condition of a map was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verification {
    Unchecked,
    Exhaustive,
    VerifiedOnSamples { samples: usize },
}

impl Verification {
    /// The weaker of two verification modes.
    pub fn meet(self, other: Verification) -> Verification {
        use Verification::*;
        match (self, other) {
            (Unchecked, _) | (_, Unchecked) => Unchecked,
            (VerifiedOnSamples { samples: a }, VerifiedOnSamples { samples: b }) => {
                VerifiedOnSamples { samples: a.min(b) }
            }
            (VerifiedOnSamples { samples }, _) | (_, VerifiedOnSamples { samples }) => {
                VerifiedOnSamples { samples }
            }
            (Exhaustive, Exhaustive) => Exhaustive,
        }
    }
}

/// The body of a local rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleBody {
    /// One polynomial per codomain coordinate, in variables `x_{m,i}` at
    /// index `m * dim + i`.
    Polynomial(Vec<MultiPoly>),
    /// Output point index for every input tuple code.
    Table(Vec<u32>),
}

/// A map `A^arity -> B` given by polynomials or a table.
#[derive(Debug)]
pub struct RegularMap {
    domain: Arc<Alphabet>,
    codomain: Arc<Alphabet>,
    arity: usize,
    body: RuleBody,
    verification: Verification,
    table: OnceLock<Vec<u32>>,
}

impl Clone for RegularMap {
    fn clone(&self) -> Self {
        RegularMap {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            arity: self.arity,
            body: self.body.clone(),
            verification: self.verification,
            table: self.table.clone(),
        }
    }
}

impl PartialEq for RegularMap {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain
            && self.codomain == other.codomain
            && self.arity == other.arity
            && self.body == other.body
    }
}

impl RegularMap {
    /// A polynomial map; structural checks only (see [`check_regular_map`]).
    pub fn polynomial(
        domain: Arc<Alphabet>,
        codomain: Arc<Alphabet>,
        arity: usize,
        components: Vec<MultiPoly>,
    ) -> Result<Self> {
        let (Some(fd), Some(fc)) = (domain.field(), codomain.field()) else {
            return Err(Error::AlphabetMismatch(
                "polynomial bodies need variety alphabets".into(),
            ));
        };
        if fd != fc {
            return Err(Error::FieldMismatch(format!("domain over {fd}, codomain over {fc}")));
        }
        if components.len() != codomain.dim() {
            return Err(Error::Arity {
                expected: codomain.dim(),
                got: components.len(),
            });
        }
        let nvars = arity * domain.dim();
        for c in &components {
            if c.field() != fd {
                return Err(Error::FieldMismatch(format!("component over {}", c.field())));
            }
            if c.nvars() != nvars {
                return Err(Error::Arity {
                    expected: nvars,
                    got: c.nvars(),
                });
            }
        }
        Ok(RegularMap {
            domain,
            codomain,
            arity,
            body: RuleBody::Polynomial(components),
            verification: Verification::Unchecked,
            table: OnceLock::new(),
        })
    }

    /// A table map between finite alphabets.
    pub fn table(
        domain: Arc<Alphabet>,
        codomain: Arc<Alphabet>,
        arity: usize,
        entries: Vec<u32>,
    ) -> Result<Self> {
        let (Some(nd), Some(nc)) = (domain.size(), codomain.size()) else {
            return Err(Error::InfiniteAlphabet);
        };
        let count = tuple_count(nd, arity, TABLE_CAP)?;
        if entries.len() != count {
            return Err(Error::Arity {
                expected: count,
                got: entries.len(),
            });
        }
        if let Some(bad) = entries.iter().position(|&e| e as usize >= nc) {
            return Err(Error::Precondition(format!(
                "table entry {bad} maps outside the codomain"
            )));
        }
        let cell = OnceLock::new();
        cell.set(entries.clone()).unwrap();
        Ok(RegularMap {
            domain,
            codomain,
            arity,
            body: RuleBody::Table(entries),
            verification: Verification::Exhaustive,
            table: cell,
        })
    }

    pub fn domain(&self) -> &Arc<Alphabet> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<Alphabet> {
        &self.codomain
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn body(&self) -> &RuleBody {
        &self.body
    }

    pub fn verification(&self) -> Verification {
        self.verification
    }

    pub(crate) fn with_verification(mut self, v: Verification) -> Self {
        self.verification = v;
        self
    }

    pub fn polynomials(&self) -> Option<&[MultiPoly]> {
        match &self.body {
            RuleBody::Polynomial(p) => Some(p),
            RuleBody::Table(_) => None,
        }
    }

    /// Lookup table over point indices, materialized on first use.
    /// Fails if a polynomial output leaves the codomain.
    pub fn lookup_table(&self) -> Result<&[u32]> {
        if let Some(t) = self.table.get() {
            return Ok(t);
        }
        let t = self.compute_table()?;
        Ok(self.table.get_or_init(|| t))
    }

    fn compute_table(&self) -> Result<Vec<u32>> {
        let (Some(nd), Some(_)) = (self.domain.size(), self.codomain.size()) else {
            return Err(Error::InfiniteAlphabet);
        };
        let count = tuple_count(nd, self.arity, TABLE_CAP)?;
        let RuleBody::Polynomial(comps) = &self.body else {
            unreachable!("table bodies are materialized at construction");
        };
        let points: Vec<Point> = (0..nd).map(|i| self.domain.point(i)).collect();
        let mut tuple = vec![0usize; self.arity];
        let mut out = Vec::with_capacity(count);
        let mut flat = Vec::with_capacity(self.arity * self.domain.dim());
        for code in 0..count {
            decode_tuple(code, nd, &mut tuple);
            flat.clear();
            for &a in &tuple {
                flat.extend(points[a].coords().unwrap().iter().cloned());
            }
            let value = comps
                .iter()
                .map(|c| c.eval(&flat))
                .collect::<Result<Vec<_>>>()?;
            let image = Point::Coords(value);
            match self.codomain.index_of(&image) {
                Some(i) => out.push(i as u32),
                None => {
                    let input: Vec<String> =
                        tuple.iter().map(|&a| self.domain.format_point(&points[a])).collect();
                    return Err(Error::CodomainViolation {
                        input: format!("({})", input.join(", ")),
                        output: self.codomain.format_point(&image),
                    });
                }
            }
        }
        Ok(out)
    }

    /// Evaluates on point indices of a finite domain.
    pub fn apply_indices(&self, tuple: &[usize]) -> Result<usize> {
        let t = self.lookup_table()?;
        let nd = self.domain.size().unwrap();
        Ok(t[encode_tuple(tuple, nd)] as usize)
    }

    /// Exact evaluation on points (or table lookup).
    pub fn apply(&self, input: &[Point]) -> Result<Point> {
        if input.len() != self.arity {
            return Err(Error::Arity {
                expected: self.arity,
                got: input.len(),
            });
        }
        if let Some(bad) = input.iter().find(|p| !self.domain.contains(p)) {
            return Err(Error::AlphabetMismatch(format!(
                "input {bad:?} is not a point of the domain"
            )));
        }
        match &self.body {
            RuleBody::Table(t) => {
                let nd = self.domain.size().unwrap();
                let idx: Vec<usize> = input.iter().map(|p| self.domain.index_of(p).unwrap()).collect();
                Ok(self.codomain.point(t[encode_tuple(&idx, nd)] as usize))
            }
            RuleBody::Polynomial(comps) => {
                let flat: Vec<FieldElement> = input
                    .iter()
                    .flat_map(|p| p.coords().unwrap().iter().cloned())
                    .collect();
                let out = Point::Coords(
                    comps
                        .iter()
                        .map(|c| c.eval(&flat))
                        .collect::<Result<Vec<_>>>()?,
                );
                if !self.codomain.contains(&out) {
                    return Err(Error::CodomainViolation {
                        input: format!("{input:?}"),
                        output: self.codomain.format_point(&out),
                    });
                }
                Ok(out)
            }
        }
    }
}

impl RegularMap {
    /// The identity `A -> A` (arity 1).
    pub fn identity(alphabet: Arc<Alphabet>) -> Result<Self> {
        match alphabet.as_ref() {
            Alphabet::Table(t) => {
                let n = t.symbols.len() as u32;
                RegularMap::table(alphabet.clone(), alphabet, 1, (0..n).collect())
            }
            _ => {
                let field = alphabet.field().unwrap();
                let dim = alphabet.dim();
                let comps = (0..dim).map(|i| MultiPoly::var(field, dim, i)).collect();
                let verification = if alphabet.is_finite() {
                    Verification::Exhaustive
                } else {
                    Verification::VerifiedOnSamples { samples: 0 }
                };
                Ok(RegularMap::polynomial(alphabet.clone(), alphabet, 1, comps)?
                    .with_verification(verification))
            }
        }
    }

    /// `g(y_0, …, y_{k-1}) = f(z_0, …, z_{n-1})` with `z_m = y_{sel[m]}`, or
    /// the point `base` where `sel[m]` is `None`. Covers permuting,
    /// padding and dropping arguments; verification status carries over.
    pub fn pull_back(&self, new_arity: usize, sel: &[Option<usize>], base: Option<&Point>) -> Result<Self> {
        if sel.len() != self.arity {
            return Err(Error::Arity {
                expected: self.arity,
                got: sel.len(),
            });
        }
        if sel.iter().flatten().any(|&j| j >= new_arity) {
            return Err(Error::Precondition("argument selector out of range".into()));
        }
        if sel.iter().any(Option::is_none) {
            match base {
                Some(b) if self.domain.contains(b) => {}
                Some(b) => return Err(Error::NotAPoint(format!("{b:?}"))),
                None => return Err(Error::EmptyAlphabet),
            }
        }
        let out = match &self.body {
            RuleBody::Polynomial(comps) => {
                let field = self.domain.field().unwrap();
                let dim = self.domain.dim();
                let nvars = new_arity * dim;
                let mut assignment = Vec::with_capacity(self.arity * dim);
                for s in sel {
                    for i in 0..dim {
                        assignment.push(match s {
                            Some(j) => MultiPoly::var(field, nvars, j * dim + i),
                            None => MultiPoly::constant(
                                field,
                                nvars,
                                base.unwrap().coords().unwrap()[i].clone(),
                            ),
                        });
                    }
                }
                let comps = comps
                    .iter()
                    .map(|c| {
                        if assignment.is_empty() {
                            // nothing to substitute; only widen the variable set
                            Ok(c.remap_variables(&[], nvars))
                        } else {
                            c.substitute(&assignment)
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                RegularMap::polynomial(self.domain.clone(), self.codomain.clone(), new_arity, comps)?
            }
            RuleBody::Table(_) => {
                let nd = self.domain.size().unwrap();
                let count = tuple_count(nd, new_arity, TABLE_CAP)?;
                let base_idx = base.and_then(|b| self.domain.index_of(b));
                let t = self.lookup_table()?;
                let mut y = vec![0usize; new_arity];
                let mut z = vec![0usize; self.arity];
                let mut entries = Vec::with_capacity(count);
                for code in 0..count {
                    decode_tuple(code, nd, &mut y);
                    for (zm, s) in z.iter_mut().zip(sel) {
                        *zm = match s {
                            Some(j) => y[*j],
                            None => base_idx.unwrap(),
                        };
                    }
                    entries.push(t[encode_tuple(&z, nd)]);
                }
                RegularMap::table(self.domain.clone(), self.codomain.clone(), new_arity, entries)?
            }
        };
        Ok(out.with_verification(self.verification))
    }

    /// Same map with its (finite) lookup table as the body.
    pub fn to_table(&self) -> Result<Self> {
        let t = self.lookup_table()?.to_vec();
        RegularMap::table(self.domain.clone(), self.codomain.clone(), self.arity, t)
    }
}

/// Deterministic sample tuples of points of `alphabet` (small integers
/// and halves in every coordinate), keeping only genuine points.
pub fn sample_tuples(alphabet: &Alphabet, arity: usize, count: usize) -> Vec<Vec<Point>> {
    const VALUES: [(i64, i64); 9] = [(0, 1), (1, 1), (-1, 1), (2, 1), (-2, 1), (1, 2), (-3, 2), (3, 1), (5, 3)];
    if let Some(n) = alphabet.size() {
        if n == 0 {
            return Vec::new();
        }
        return (0..count)
            .map(|t| (0..arity).map(|k| alphabet.point((t * (2 * k + 1) + k) % n)).collect())
            .collect();
    }
    let field = alphabet.field().unwrap();
    let dim = alphabet.dim();
    let mut out = Vec::new();
    for t in 0..count {
        let tuple: Vec<Point> = (0..arity)
            .map(|k| {
                Point::Coords(
                    (0..dim)
                        .map(|i| {
                            let (n, d) = VALUES[(t * (k + 2) + i * 5 + k) % VALUES.len()];
                            field.from_fraction(&n.into(), &d.into()).unwrap()
                        })
                        .collect(),
                )
            })
            .collect();
        if tuple.iter().all(|p| alphabet.contains(p)) {
            out.push(tuple);
        }
    }
    out
}

/// Verifies that every input tuple lands in the codomain: exhaustively for
/// finite domains, on `samples` (tuples of domain points) otherwise.
pub fn check_regular_map(m: &RegularMap, samples: &[Vec<Point>]) -> Result<RegularMap> {
    if m.domain.is_finite() && m.codomain.is_finite() {
        m.lookup_table()?;
        return Ok(m.clone().with_verification(Verification::Exhaustive));
    }
    let mut used = 0;
    for s in samples {
        if s.len() != m.arity || !s.iter().all(|p| m.domain.contains(p)) {
            continue;
        }
        m.apply(s)?;
        used += 1;
    }
    Ok(m
        .clone()
        .with_verification(Verification::VerifiedOnSamples { samples: used }))
}
