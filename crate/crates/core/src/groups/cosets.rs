//! Finite-index subgroups, right coset spaces `H\G`, and subgroup
//! search schedules.

use serde::Serialize;

use super::lattice::Sublattice;
use super::{FiniteGroup, FiniteSubset, GroupElement, GroupSpec};
use crate::error::{Error, Result};

/// A finite-index subgroup `H ⊂ G`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum FiniteIndexSubgroup {
    /// HNF basis of a full-rank sublattice of `Z^d`.
    Lattice(Sublattice),
    /// Sorted element indices of a subgroup of a finite group.
    Finite(Vec<usize>),
}

impl FiniteIndexSubgroup {
    pub fn index(&self, group: &GroupSpec) -> usize {
        match (self, group) {
            (FiniteIndexSubgroup::Lattice(l), _) => l.index(),
            (FiniteIndexSubgroup::Finite(h), GroupSpec::Finite(g)) => g.order() / h.len(),
            _ => panic!("subgroup of a foreign group"),
        }
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        match (self, x) {
            (FiniteIndexSubgroup::Lattice(l), GroupElement::Vector(v)) => l.contains(v),
            (FiniteIndexSubgroup::Finite(h), GroupElement::Index(i)) => h.binary_search(i).is_ok(),
            _ => false,
        }
    }

    /// `k Z^d`.
    pub fn diagonal(rank: usize, k: i64) -> Self {
        FiniteIndexSubgroup::Lattice(Sublattice::diagonal(rank, k))
    }

    fn check(&self, group: &GroupSpec) -> Result<()> {
        match (self, group) {
            (FiniteIndexSubgroup::Lattice(l), GroupSpec::FreeAbelian { rank }) if l.rank() == *rank => {
                Ok(())
            }
            (FiniteIndexSubgroup::Finite(h), GroupSpec::Finite(g)) => {
                if h != &g.closure(h) {
                    return Err(Error::GroupMismatch("element set is not a subgroup".into()));
                }
                Ok(())
            }
            _ => Err(Error::GroupMismatch(format!("subgroup does not belong to {group}"))),
        }
    }
}

impl std::fmt::Display for FiniteIndexSubgroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FiniteIndexSubgroup::Lattice(l) => {
                let rows: Vec<String> = l
                    .matrix()
                    .iter()
                    .map(|r| r.iter().map(i64::to_string).collect::<Vec<_>>().join(","))
                    .collect();
                write!(f, "lattice[{}]", rows.join(";"))
            }
            FiniteIndexSubgroup::Finite(h) => write!(f, "subgroup{h:?}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Reducer {
    Lattice(Sublattice),
    Finite { coset_of: Vec<usize> },
}

/// Right cosets `H\G` with one representative each, the identity's coset
/// first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetSpace {
    group: GroupSpec,
    subgroup: FiniteIndexSubgroup,
    representatives: Vec<GroupElement>,
    reducer: Reducer,
}

/// Builds `H\G` with canonical representatives: for `Z^d`, the standard
/// box `0 <= x_i < h_ii` (first coordinate varying fastest); for finite
/// groups, the least element of each coset.
pub fn coset_space(h: &FiniteIndexSubgroup, g: &GroupSpec) -> Result<CosetSpace> {
    h.check(g)?;
    match (h, g) {
        (FiniteIndexSubgroup::Lattice(l), _) => {
            let diag = l.diagonal_entries();
            let index = l.index();
            let representatives = (0..index)
                .map(|i| GroupElement::Vector(box_vector(i, &diag, &vec![0; diag.len()])))
                .collect();
            Ok(CosetSpace {
                group: g.clone(),
                subgroup: h.clone(),
                representatives,
                reducer: Reducer::Lattice(l.clone()),
            })
        }
        (FiniteIndexSubgroup::Finite(elems), GroupSpec::Finite(fg)) => {
            Ok(finite_cosets(fg, elems, g, h))
        }
        _ => unreachable!("checked above"),
    }
}

fn finite_cosets(
    fg: &FiniteGroup,
    elems: &[usize],
    g: &GroupSpec,
    h: &FiniteIndexSubgroup,
) -> CosetSpace {
    let n = fg.order();
    let mut coset_of = vec![usize::MAX; n];
    let mut reps = Vec::new();
    let mut order: Vec<usize> = vec![fg.identity()];
    order.extend((0..n).filter(|&x| x != fg.identity()));
    for x in order {
        if coset_of[x] != usize::MAX {
            continue;
        }
        let id = reps.len();
        // representative: least element of Hx, except the identity coset
        let members: Vec<usize> = elems.iter().map(|&hh| fg.mul(hh, x)).collect();
        for &m in &members {
            coset_of[m] = id;
        }
        let rep = if id == 0 {
            fg.identity()
        } else {
            *members.iter().min().unwrap()
        };
        reps.push(GroupElement::Index(rep));
    }
    CosetSpace {
        group: g.clone(),
        subgroup: h.clone(),
        representatives: reps,
        reducer: Reducer::Finite { coset_of },
    }
}

fn box_vector(mut i: usize, diag: &[i64], offset: &[i64]) -> Vec<i64> {
    diag.iter()
        .zip(offset)
        .map(|(&h, &o)| {
            let x = (i % h as usize) as i64;
            i /= h as usize;
            x + o
        })
        .collect()
}

fn box_index(v: &[i64], diag: &[i64], offset: &[i64]) -> usize {
    let mut idx = 0usize;
    let mut stride = 1usize;
    for ((&x, &h), &o) in v.iter().zip(diag).zip(offset) {
        idx += (x - o) as usize * stride;
        stride *= h as usize;
    }
    idx
}

impl CosetSpace {
    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn subgroup(&self) -> &FiniteIndexSubgroup {
        &self.subgroup
    }

    pub fn index(&self) -> usize {
        self.representatives.len()
    }

    pub fn representatives(&self) -> &[GroupElement] {
        &self.representatives
    }

    /// The index of the coset `Hg`.
    pub fn reduce(&self, g: &GroupElement) -> usize {
        match (&self.reducer, g) {
            (Reducer::Lattice(l), GroupElement::Vector(v)) => {
                let diag = l.diagonal_entries();
                let zero = vec![0; diag.len()];
                box_index(&l.reduce(v), &diag, &zero)
            }
            (Reducer::Finite { coset_of }, GroupElement::Index(i)) => coset_of[*i],
            _ => panic!("reducing a foreign element"),
        }
    }

    /// Another complete set of representatives, listed in coset order, taken
    /// from a box centred near the identity (`-⌊h_ii/2⌋ <= x_i`). Growing
    /// subgroups give growing centred boxes, so every finite subset of
    /// `Z^d` eventually lies inside one. Finite groups use the canonical
    /// representatives.
    pub fn centered_representatives(&self) -> Vec<GroupElement> {
        match &self.reducer {
            Reducer::Lattice(l) => {
                let diag = l.diagonal_entries();
                let offset: Vec<i64> = diag.iter().map(|h| -(h / 2)).collect();
                let mut out = vec![GroupElement::Vector(Vec::new()); self.index()];
                for i in 0..self.index() {
                    let v = box_vector(i, &diag, &offset);
                    let c = self.reduce(&GroupElement::Vector(v.clone()));
                    out[c] = GroupElement::Vector(v);
                }
                out
            }
            Reducer::Finite { .. } => self.representatives.clone(),
        }
    }
}

/// The ordered list of subgroups a scan or synthesis visits.
///
/// For `Z^d`: `k Z^d` for `k = 1..=diagonal_max` (skipping those above
/// the index bound), then every remaining HNF sublattice with index
/// `<= index_bound` by increasing index. For finite groups: all
/// subgroups with index `<= index_bound`, by increasing index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Schedule {
    pub diagonal_max: usize,
    pub index_bound: usize,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule {
            diagonal_max: 8,
            index_bound: 32,
        }
    }
}

impl Schedule {
    pub fn subgroups(&self, group: &GroupSpec) -> Vec<FiniteIndexSubgroup> {
        match group {
            GroupSpec::FreeAbelian { rank } => {
                let mut out: Vec<FiniteIndexSubgroup> = Vec::new();
                for k in 1..=self.diagonal_max {
                    let idx = (k as u128).pow(*rank as u32);
                    if idx <= self.index_bound as u128 {
                        out.push(FiniteIndexSubgroup::diagonal(*rank, k as i64));
                    }
                }
                for index in 1..=self.index_bound {
                    for l in Sublattice::enumerate_with_index(*rank, index) {
                        let h = FiniteIndexSubgroup::Lattice(l);
                        if !out.contains(&h) {
                            out.push(h);
                        }
                    }
                }
                out
            }
            GroupSpec::Finite(g) => g
                .subgroups()
                .into_iter()
                .filter(|h| g.order() / h.len() <= self.index_bound)
                .map(FiniteIndexSubgroup::Finite)
                .collect(),
        }
    }
}

/// The first subgroup (by increasing index) whose cosets `Hg`, `g ∈ n`,
/// are pairwise distinct, searching up to index `bound`.
///
/// For `Z^d` a diagonal lattice `k Z^d` with `k` larger than the
/// coordinate spread of `n` always separates, so `bound >= (spread+1)^d`
/// guarantees success.
pub fn separating_subgroup(
    n: &FiniteSubset,
    g: &GroupSpec,
    bound: usize,
) -> Result<FiniteIndexSubgroup> {
    if n.is_empty() {
        return Err(Error::Precondition("separating set must be nonempty".into()));
    }
    for x in n.iter() {
        g.check(x)?;
    }
    let separates = |h: &FiniteIndexSubgroup| -> bool {
        let cosets = coset_space(h, g).expect("subgroup of g");
        let mut seen = std::collections::HashSet::new();
        n.iter().all(|x| seen.insert(cosets.reduce(x)))
    };
    match g {
        GroupSpec::FreeAbelian { rank } => {
            for index in 1..=bound {
                for l in Sublattice::enumerate_with_index(*rank, index) {
                    let h = FiniteIndexSubgroup::Lattice(l);
                    if separates(&h) {
                        return Ok(h);
                    }
                }
            }
            let spread = coordinate_spread(n);
            debug_assert!(
                (bound as u128) < (spread as u128 + 1).pow(*rank as u32),
                "a diagonal lattice within the bound always separates"
            );
            Err(Error::SearchExhausted(bound))
        }
        GroupSpec::Finite(fg) => {
            for h in fg.subgroups() {
                if fg.order() / h.len() > bound {
                    continue;
                }
                let h = FiniteIndexSubgroup::Finite(h);
                if separates(&h) {
                    return Ok(h);
                }
            }
            Err(Error::SearchExhausted(bound))
        }
    }
}

/// Largest coordinate difference within `n` (0 for finite groups).
pub fn coordinate_spread(n: &FiniteSubset) -> i64 {
    let vecs: Vec<&[i64]> = n.iter().filter_map(GroupElement::as_vector).collect();
    let Some(first) = vecs.first() else { return 0 };
    (0..first.len())
        .map(|i| {
            let lo = vecs.iter().map(|v| v[i]).min().unwrap();
            let hi = vecs.iter().map(|v| v[i]).max().unwrap();
            hi - lo
        })
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::super::hermite_normal_form;
    use super::*;

    fn v(x: &[i64]) -> GroupElement {
        GroupElement::Vector(x.to_vec())
    }

    #[test]
    fn cosets_of_2z() {
        let cs = coset_space(&FiniteIndexSubgroup::diagonal(1, 2), &GroupSpec::integers()).unwrap();
        assert_eq!(cs.representatives(), &[v(&[0]), v(&[1])]);
        assert_eq!(cs.reduce(&v(&[7])), 1);
    }

    #[test]
    fn cosets_of_diag_2_2() {
        let z2 = GroupSpec::free_abelian(2).unwrap();
        let cs = coset_space(&FiniteIndexSubgroup::diagonal(2, 2), &z2).unwrap();
        assert_eq!(cs.index(), 4);
        assert_eq!(
            cs.representatives(),
            &[v(&[0, 0]), v(&[1, 0]), v(&[0, 1]), v(&[1, 1])]
        );
    }

    #[test]
    fn negative_reduction() {
        let cs = coset_space(&FiniteIndexSubgroup::diagonal(1, 3), &GroupSpec::integers()).unwrap();
        assert_eq!(cs.reduce(&v(&[-1])), 2);
    }

    #[test]
    fn reduce_is_constant_on_cosets_exhaustively() {
        let z2 = GroupSpec::free_abelian(2).unwrap();
        let l = hermite_normal_form(&[vec![2, 1], vec![1, 3]]).unwrap();
        let h = FiniteIndexSubgroup::Lattice(l.clone());
        let cs = coset_space(&h, &z2).unwrap();
        for (i, r) in cs.representatives().iter().enumerate() {
            assert_eq!(cs.reduce(r), i);
        }
        let pts: Vec<Vec<i64>> = (-4..=4).flat_map(|a| (-4..=4).map(move |b| vec![a, b])).collect();
        for a in &pts {
            for b in &pts {
                let same = cs.reduce(&v(a)) == cs.reduce(&v(b));
                let diff = [a[0] - b[0], a[1] - b[1]];
                assert_eq!(same, l.contains(&diff), "{a:?} {b:?}");
            }
        }
    }

    #[test]
    fn centered_representatives_cover_cosets() {
        let cs = coset_space(&FiniteIndexSubgroup::diagonal(1, 4), &GroupSpec::integers()).unwrap();
        let reps = cs.centered_representatives();
        let mut sorted = reps.clone();
        sorted.sort();
        assert_eq!(sorted, vec![v(&[-2]), v(&[-1]), v(&[0]), v(&[1])]);
        for (i, r) in reps.iter().enumerate() {
            assert_eq!(cs.reduce(r), i);
        }
        assert_eq!(reps[0], v(&[0]));
    }

    #[test]
    fn separating_examples() {
        let z = GroupSpec::integers();
        let n = FiniteSubset::integers([-1, 0, 1]);
        assert_eq!(
            separating_subgroup(&n, &z, 10).unwrap(),
            FiniteIndexSubgroup::diagonal(1, 3)
        );
        let zero = FiniteSubset::integers([0]);
        assert_eq!(
            separating_subgroup(&zero, &z, 10).unwrap(),
            FiniteIndexSubgroup::diagonal(1, 1)
        );
        let z2 = GroupSpec::free_abelian(2).unwrap();
        let n2 = FiniteSubset::new(&z2, vec![v(&[0, 0]), v(&[1, 0])]).unwrap();
        let h = separating_subgroup(&n2, &z2, 10).unwrap();
        assert_eq!(h.index(&z2), 2);
        assert!(!h.contains(&v(&[1, 0])));
    }

    #[test]
    fn rejected_candidates_really_fail() {
        let z = GroupSpec::integers();
        let cs = coset_space(&FiniteIndexSubgroup::diagonal(1, 2), &z).unwrap();
        assert_eq!(cs.reduce(&v(&[-1])), cs.reduce(&v(&[1])));
    }

    #[test]
    fn finite_group_cosets() {
        let g = GroupSpec::Finite(crate::groups::tests::symmetric_group_3());
        let h = FiniteIndexSubgroup::Finite(vec![0, 1]);
        let cs = coset_space(&h, &g).unwrap();
        assert_eq!(cs.index(), 3);
        assert_eq!(cs.representatives()[0], GroupElement::Index(0));
        for x in 0..6 {
            for &hh in &[0usize, 1] {
                let hx = g.op(&GroupElement::Index(hh), &GroupElement::Index(x));
                assert_eq!(cs.reduce(&hx), cs.reduce(&GroupElement::Index(x)));
            }
        }
    }

    #[test]
    fn schedule_order() {
        let s = Schedule {
            diagonal_max: 8,
            index_bound: 4,
        };
        let z2 = GroupSpec::free_abelian(2).unwrap();
        let subs = s.subgroups(&z2);
        assert_eq!(subs[0], FiniteIndexSubgroup::diagonal(2, 1));
        assert_eq!(subs[1], FiniteIndexSubgroup::diagonal(2, 2));
        // 1 + 3 + 4 + 7 lattices of index <= 4
        assert_eq!(subs.len(), 15);
        let z = GroupSpec::integers();
        let ones: Vec<usize> = Schedule::default().subgroups(&z).iter().map(|h| h.index(&z)).collect();
        assert_eq!(ones, (1..=32).collect::<Vec<_>>());
    }
}
