use serde::Serialize;

use crate::algebra::{Field, LinearSolution, LinearSystem, solve_linear};
use crate::error::{Error, Result};
use crate::groups::{FiniteGroup, GroupElement, GroupSpec};

use super::CellularAutomaton;

/// A subgroup `H ⊂ G` to restrict to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum SubgroupDescription {
    /// Linearly independent generators of a sublattice of `Z^d`; `H` is
    /// identified with `Z^k` through this basis. No generators means the
    /// trivial subgroup.
    LatticeBasis(Vec<Vec<i64>>),
    /// The element indices of a subgroup of a finite group.
    Elements(Vec<usize>),
}

/// The restriction of `ca` to `H ⊃ M`: same memory and rule, with the
/// memory rewritten in the coordinates of `H`.
pub fn restrict(ca: &CellularAutomaton, h: &SubgroupDescription) -> Result<CellularAutomaton> {
    let (group, elements) = match (h, &ca.group) {
        (SubgroupDescription::LatticeBasis(basis), GroupSpec::FreeAbelian { rank }) => {
            lattice_coordinates(ca, basis, *rank)?
        }
        (SubgroupDescription::Elements(elems), GroupSpec::Finite(g)) => subgroup_coordinates(ca, elems, g)?,
        _ => {
            return Err(Error::GroupMismatch(format!(
                "subgroup description does not fit {}",
                ca.group
            )))
        }
    };
    CellularAutomaton::from_ordered(group, elements, ca.rule.clone())
}

fn lattice_coordinates(
    ca: &CellularAutomaton,
    basis: &[Vec<i64>],
    rank: usize,
) -> Result<(GroupSpec, Vec<GroupElement>)> {
    if basis.iter().any(|b| b.len() != rank) {
        return Err(Error::GroupMismatch(format!("generators must lie in Z^{rank}")));
    }
    let k = basis.len();
    if k == 0 {
        let zero = vec![0; rank];
        if let Some(h) = ca.memory.iter().find(|h| h.as_vector() != Some(&zero)) {
            return Err(Error::NotInSubgroup(h.to_string()));
        }
        let elements = ca.memory.iter().map(|_| GroupSpec::trivial().identity()).collect();
        return Ok((GroupSpec::trivial(), elements));
    }
    let q = Field::Rationals;
    let matrix: Vec<Vec<_>> = (0..rank)
        .map(|i| basis.iter().map(|b| q.from_i64(b[i])).collect())
        .collect();
    let solve = |target: &[i64]| -> Result<LinearSolution> {
        let rhs = target.iter().map(|&t| q.from_i64(t)).collect();
        let sys = LinearSystem::new(q, k, matrix.clone(), rhs)?;
        Ok(solve_linear(&sys))
    };
    if let LinearSolution::Solved { kernel, .. } = solve(&vec![0; rank])? {
        if !kernel.is_empty() {
            return Err(Error::Precondition("lattice generators are linearly dependent".into()));
        }
    }
    let mut elements = Vec::with_capacity(ca.memory.len());
    for h in ca.memory.iter() {
        let v = h.as_vector().expect("element of Z^d");
        let coords = match solve(v)? {
            LinearSolution::Solved { particular, .. } if particular.iter().all(|x| x.is_integral()) => particular,
            _ => return Err(Error::NotInSubgroup(h.to_string())),
        };
        let coords = coords
            .iter()
            .map(|x| {
                let r = x.as_rational().unwrap().to_integer();
                i64::try_from(r).map_err(|_| Error::NotInSubgroup(h.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        elements.push(GroupElement::Vector(coords));
    }
    Ok((GroupSpec::free_abelian(k)?, elements))
}

fn subgroup_coordinates(
    ca: &CellularAutomaton,
    elems: &[usize],
    g: &FiniteGroup,
) -> Result<(GroupSpec, Vec<GroupElement>)> {
    let mut sorted = elems.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.iter().any(|&x| x >= g.order()) || g.closure(&sorted) != sorted {
        return Err(Error::GroupMismatch("element set is not a subgroup".into()));
    }
    let pos = |x: usize| sorted.binary_search(&x).ok();
    let table = sorted
        .iter()
        .map(|&a| sorted.iter().map(|&b| pos(g.mul(a, b)).unwrap()).collect())
        .collect();
    let sub = FiniteGroup::new(table, pos(g.identity()).unwrap())?;
    let elements = ca
        .memory
        .iter()
        .map(|h| match h {
            GroupElement::Index(i) => pos(*i)
                .map(GroupElement::Index)
                .ok_or_else(|| Error::NotInSubgroup(h.to_string())),
            _ => Err(Error::NotInSubgroup(h.to_string())),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((GroupSpec::Finite(sub), elements))
}
