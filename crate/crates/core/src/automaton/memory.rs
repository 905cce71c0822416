use crate::alphabet::{RegularMap, RuleBody};
use crate::error::{Error, Result};
use crate::groups::FiniteSubset;

use super::CellularAutomaton;

/// For each memory element, whether the rule depends on it.
///
/// Finite alphabets: semantic dependence (two inputs differing only there
/// with different outputs). Infinite alphabets: syntactic occurrence in
/// the canonical polynomial body, which is sound but may over-report.
pub fn depends_on(ca: &CellularAutomaton) -> Result<Vec<bool>> {
    let k = ca.memory.len();
    let alphabet = ca.alphabet();
    match alphabet.size() {
        Some(nd) => {
            let table = ca.rule.lookup_table()?;
            let mut dep = vec![false; k];
            let mut stride = 1usize;
            for d in dep.iter_mut() {
                'codes: for code in 0..table.len() {
                    if (code / stride) % nd != 0 {
                        continue;
                    }
                    for a in 1..nd {
                        if table[code + a * stride] != table[code] {
                            *d = true;
                            break 'codes;
                        }
                    }
                }
                stride *= nd;
            }
            Ok(dep)
        }
        None => {
            let dim = alphabet.dim();
            let mut dep = vec![false; k];
            if let RuleBody::Polynomial(comps) = ca.rule.body() {
                for c in comps {
                    for v in c.variables_used() {
                        dep[v / dim] = true;
                    }
                }
            }
            Ok(dep)
        }
    }
}

/// Restricts the memory to the elements the rule depends on.
///
/// Unused arguments are fixed at a base point (the first point of a
/// finite alphabet), which leaves the semantics unchanged. Over infinite
/// alphabets the result is only syntactically minimal.
pub fn minimal_memory(ca: &CellularAutomaton) -> Result<CellularAutomaton> {
    let dep = depends_on(ca)?;
    if dep.iter().all(|&d| d) {
        return Ok(ca.clone());
    }
    let kept: Vec<_> = ca
        .memory
        .iter()
        .zip(&dep)
        .filter(|(_, &d)| d)
        .map(|(h, _)| h.clone())
        .collect();
    let memory = FiniteSubset::from_elements(kept);
    let sel: Vec<Option<usize>> = ca
        .memory
        .iter()
        .zip(&dep)
        .map(|(h, &d)| if d { memory.position(h) } else { None })
        .collect();
    let alphabet = ca.alphabet();
    let rule = match alphabet.size() {
        Some(0) => return Err(Error::EmptyAlphabet),
        Some(_) => {
            let base = alphabet.point(0);
            let pulled = ca.rule.pull_back(memory.len(), &sel, Some(&base))?;
            match pulled.polynomials() {
                Some(comps) => {
                    let comps = comps.iter().map(|c| c.reduce_as_function()).collect();
                    RegularMap::polynomial(alphabet.clone(), alphabet.clone(), memory.len(), comps)?
                        .with_verification(pulled.verification())
                }
                None => pulled,
            }
        }
        None => {
            // unused variables do not occur, so any index works for them
            let dim = alphabet.dim();
            let map: Vec<usize> = sel
                .iter()
                .flat_map(|s| (0..dim).map(move |i| s.map_or(0, |j| j * dim + i)))
                .collect();
            let nvars = memory.len() * dim;
            let comps = ca
                .rule
                .polynomials()
                .expect("infinite alphabets carry polynomial rules")
                .iter()
                .map(|c| c.remap_variables(&map, nvars))
                .collect();
            RegularMap::polynomial(alphabet.clone(), alphabet.clone(), memory.len(), comps)?
                .with_verification(ca.rule.verification())
        }
    };
    ca.replace_rule(memory, rule)
}

/// Adds dummy memory elements the rule ignores. Refused for finite
/// alphabets without points.
pub fn pad_memory(ca: &CellularAutomaton, extra: &FiniteSubset) -> Result<CellularAutomaton> {
    for h in extra.iter() {
        ca.group.check(h)?;
    }
    if ca.alphabet().size() == Some(0) {
        return Err(Error::EmptyAlphabet);
    }
    ca.with_memory(&ca.memory.union(extra))
}
