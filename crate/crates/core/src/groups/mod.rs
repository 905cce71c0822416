//! Group universes: `Z^d` and finite groups given by a multiplication
//! table, together with finite subsets, finite-index subgroups and
//! coset spaces.

mod cosets;
mod lattice;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

pub use cosets::{coordinate_spread, coset_space, separating_subgroup, CosetSpace, FiniteIndexSubgroup, Schedule};
pub use lattice::{hermite_normal_form, Sublattice};

/// A finite group given by its multiplication table.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

impl FiniteGroup {
    /// Validates associativity, the identity and inverses exhaustively.
    pub fn new(table: Vec<Vec<usize>>, identity: usize) -> Result<Self> {
        let n = table.len();
        let bad = |m: String| Err(Error::InvalidGroupTable(m));
        if n == 0 {
            return bad("empty table".into());
        }
        if identity >= n {
            return bad(format!("identity index {identity} out of range"));
        }
        for (a, row) in table.iter().enumerate() {
            if row.len() != n {
                return bad(format!("row {a} has length {}", row.len()));
            }
            if let Some(&x) = row.iter().find(|&&x| x >= n) {
                return bad(format!("entry {x} in row {a} out of range"));
            }
        }
        for a in 0..n {
            if table[identity][a] != a || table[a][identity] != a {
                return bad(format!("{identity} is not a two-sided identity for {a}"));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return bad(format!("not associative at ({a}, {b}, {c})"));
                    }
                }
            }
        }
        let mut inverses = Vec::with_capacity(n);
        for a in 0..n {
            match (0..n).find(|&b| table[a][b] == identity && table[b][a] == identity) {
                Some(b) => inverses.push(b),
                None => return bad(format!("{a} has no inverse")),
            }
        }
        Ok(FiniteGroup {
            table,
            identity,
            inverses,
        })
    }

    /// The cyclic group `Z/n` with identity 0.
    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        FiniteGroup::new(table, 0).expect("cyclic table is a group")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    /// The subgroup generated by `gens`, as a sorted element list.
    pub fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut set: BTreeSet<usize> = BTreeSet::from([self.identity]);
        let mut frontier: Vec<usize> = vec![self.identity];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if set.insert(y) {
                    frontier.push(y);
                }
            }
        }
        set.into_iter().collect()
    }

    /// Every subgroup, ordered by index then by element list.
    pub fn subgroups(&self) -> Vec<Vec<usize>> {
        let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut queue = vec![vec![self.identity]];
        found.insert(vec![self.identity]);
        while let Some(h) = queue.pop() {
            for g in 0..self.order() {
                if h.binary_search(&g).is_ok() {
                    continue;
                }
                let mut gens = h.clone();
                gens.push(g);
                let bigger = self.closure(&gens);
                if found.insert(bigger.clone()) {
                    queue.push(bigger);
                }
            }
        }
        let mut all: Vec<Vec<usize>> = found.into_iter().collect();
        all.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        all
    }
}

/// The universe `G`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupSpec {
    FreeAbelian { rank: usize },
    Finite(FiniteGroup),
}

/// An element of `Z^d` (integer vector) or of a finite group (index).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(untagged)]
pub enum GroupElement {
    Vector(Vec<i64>),
    Index(usize),
}

impl GroupElement {
    pub fn as_vector(&self) -> Option<&[i64]> {
        match self {
            GroupElement::Vector(v) => Some(v),
            GroupElement::Index(_) => None,
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Vector(v) => {
                let parts: Vec<String> = v.iter().map(i64::to_string).collect();
                write!(f, "{}", parts.join(","))
            }
            GroupElement::Index(i) => write!(f, "{i}"),
        }
    }
}

impl GroupSpec {
    pub fn free_abelian(rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(Error::Precondition("Z^d needs rank d >= 1".into()));
        }
        Ok(GroupSpec::FreeAbelian { rank })
    }

    pub fn integers() -> Self {
        GroupSpec::FreeAbelian { rank: 1 }
    }

    pub fn trivial() -> Self {
        GroupSpec::Finite(FiniteGroup::cyclic(1))
    }

    pub fn rank(&self) -> Option<usize> {
        match self {
            GroupSpec::FreeAbelian { rank } => Some(*rank),
            GroupSpec::Finite(_) => None,
        }
    }

    pub fn order(&self) -> Option<usize> {
        match self {
            GroupSpec::FreeAbelian { .. } => None,
            GroupSpec::Finite(g) => Some(g.order()),
        }
    }

    pub fn identity(&self) -> GroupElement {
        match self {
            GroupSpec::FreeAbelian { rank } => GroupElement::Vector(vec![0; *rank]),
            GroupSpec::Finite(g) => GroupElement::Index(g.identity()),
        }
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        match (self, x) {
            (GroupSpec::FreeAbelian { rank }, GroupElement::Vector(v)) => v.len() == *rank,
            (GroupSpec::Finite(g), GroupElement::Index(i)) => *i < g.order(),
            _ => false,
        }
    }

    pub fn check(&self, x: &GroupElement) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::GroupMismatch(format!("{x} is not an element of {self}")))
        }
    }

    /// The product `a·b`. Elements must belong to this group.
    pub fn op(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        match (self, a, b) {
            (GroupSpec::FreeAbelian { .. }, GroupElement::Vector(x), GroupElement::Vector(y)) => {
                GroupElement::Vector(x.iter().zip(y).map(|(p, q)| p + q).collect())
            }
            (GroupSpec::Finite(g), GroupElement::Index(x), GroupElement::Index(y)) => {
                GroupElement::Index(g.mul(*x, *y))
            }
            _ => panic!("group operation on foreign elements"),
        }
    }

    pub fn inverse(&self, a: &GroupElement) -> GroupElement {
        match (self, a) {
            (GroupSpec::FreeAbelian { .. }, GroupElement::Vector(x)) => {
                GroupElement::Vector(x.iter().map(|p| -p).collect())
            }
            (GroupSpec::Finite(g), GroupElement::Index(x)) => GroupElement::Index(g.inverse(*x)),
            _ => panic!("inverse of a foreign element"),
        }
    }

    /// All elements of a finite group.
    pub fn elements(&self) -> Option<Vec<GroupElement>> {
        match self {
            GroupSpec::FreeAbelian { .. } => None,
            GroupSpec::Finite(g) => Some((0..g.order()).map(GroupElement::Index).collect()),
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::FreeAbelian { rank } => write!(f, "Z^{rank}"),
            GroupSpec::Finite(g) => write!(f, "finite group of order {}", g.order()),
        }
    }
}

/// An ordered, duplicate-free finite subset of a group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct FiniteSubset {
    elements: Vec<GroupElement>,
}

impl FiniteSubset {
    pub fn new(group: &GroupSpec, elements: Vec<GroupElement>) -> Result<Self> {
        for e in &elements {
            group.check(e)?;
        }
        Ok(Self::from_elements(elements))
    }

    /// Sorts and deduplicates without membership checks.
    pub fn from_elements(mut elements: Vec<GroupElement>) -> Self {
        elements.sort();
        elements.dedup();
        FiniteSubset { elements }
    }

    pub fn empty() -> Self {
        FiniteSubset::default()
    }

    /// One-dimensional shorthand.
    pub fn integers<I: IntoIterator<Item = i64>>(values: I) -> Self {
        Self::from_elements(values.into_iter().map(|v| GroupElement::Vector(vec![v])).collect())
    }

    /// The interval `[lo, hi]` in `Z`.
    pub fn interval(lo: i64, hi: i64) -> Self {
        Self::integers(lo..=hi)
    }

    /// The box `[lo, hi]^d` in `Z^d`.
    pub fn cube(rank: usize, lo: i64, hi: i64) -> Self {
        let mut out = vec![Vec::new()];
        for _ in 0..rank {
            out = out
                .into_iter()
                .flat_map(|p: Vec<i64>| {
                    (lo..=hi).map(move |x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        Self::from_elements(out.into_iter().map(GroupElement::Vector).collect())
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn iter(&self) -> std::slice::Iter<'_, GroupElement> {
        self.elements.iter()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn position(&self, g: &GroupElement) -> Option<usize> {
        self.elements.binary_search(g).ok()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.position(g).is_some()
    }

    pub fn is_subset_of(&self, other: &FiniteSubset) -> bool {
        self.elements.iter().all(|g| other.contains(g))
    }

    pub fn union(&self, other: &FiniteSubset) -> FiniteSubset {
        let mut v = self.elements.clone();
        v.extend(other.elements.iter().cloned());
        Self::from_elements(v)
    }

    /// Translates every element on the left: `{g·s}`.
    pub fn translate(&self, group: &GroupSpec, g: &GroupElement) -> FiniteSubset {
        Self::from_elements(self.elements.iter().map(|s| group.op(g, s)).collect())
    }
}

impl fmt::Display for FiniteSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.elements.iter().map(|e| format!("({e})")).collect();
        write!(f, "{{{}}}", parts.join(" "))
    }
}

fn check_subset(s: &FiniteSubset, g: &GroupSpec) -> Result<()> {
    s.iter().try_for_each(|x| g.check(x))
}

/// `{a·b : a ∈ s, b ∈ t}`.
pub fn product_set(s: &FiniteSubset, t: &FiniteSubset, g: &GroupSpec) -> Result<FiniteSubset> {
    check_subset(s, g)?;
    check_subset(t, g)?;
    let mut out = Vec::with_capacity(s.len() * t.len());
    for a in s.iter() {
        for b in t.iter() {
            out.push(g.op(a, b));
        }
    }
    Ok(FiniteSubset::from_elements(out))
}

/// `Ω' = {g : gM ⊂ Ω} = ⋂_{h∈M} Ω h⁻¹`.
///
/// With `M` empty every `g` qualifies; since only cells of `Ω` are
/// observable through a window, the result is then `Ω` itself.
pub fn interior(omega: &FiniteSubset, m: &FiniteSubset, g: &GroupSpec) -> Result<FiniteSubset> {
    check_subset(omega, g)?;
    check_subset(m, g)?;
    let Some(first) = m.elements().first() else {
        return Ok(omega.clone());
    };
    // candidates from the first memory element, then filter
    let first_inv = g.inverse(first);
    let out = omega
        .iter()
        .map(|w| g.op(w, &first_inv))
        .filter(|cand| m.iter().all(|h| omega.contains(&g.op(cand, h))))
        .collect();
    Ok(FiniteSubset::from_elements(out))
}
