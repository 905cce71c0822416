use crate::algebra::MultiPoly;
use crate::alphabet::{decode_tuple, tuple_count, RegularMap, RuleBody, TABLE_CAP};
use crate::error::{Error, Result};
use crate::groups::product_set;

use super::CellularAutomaton;

/// `outer ∘ inner`, with memory `M'M`.
///
/// Polynomial rules compose symbolically: the inner rule translated by
/// each `h' ∈ M'` is substituted into the outer rule (followed by
/// `x^p = x` reduction over `F_p`). Any table rule forces composition by
/// enumeration over `A^{M'M}`.
pub fn compose(outer: &CellularAutomaton, inner: &CellularAutomaton) -> Result<CellularAutomaton> {
    if outer.group != inner.group {
        return Err(Error::GroupMismatch(format!("{} vs {}", outer.group, inner.group)));
    }
    if outer.alphabet() != inner.alphabet() {
        return Err(Error::AlphabetMismatch("composed automata use different alphabets".into()));
    }
    let group = &outer.group;
    let memory = product_set(&outer.memory, &inner.memory, group)?;
    // gather[a][m]: position in M'M of outer[a]·inner[m]
    let gather: Vec<Vec<usize>> = outer
        .memory
        .iter()
        .map(|a| {
            inner
                .memory
                .iter()
                .map(|h| memory.position(&group.op(a, h)).expect("product lies in M'M"))
                .collect()
        })
        .collect();
    let verification = outer.rule.verification().meet(inner.rule.verification());
    let alphabet = outer.alphabet().clone();

    let rule = match (outer.rule.body(), inner.rule.body()) {
        (RuleBody::Polynomial(out_comps), RuleBody::Polynomial(in_comps)) => {
            let dim = alphabet.dim();
            let nvars = memory.len() * dim;
            let mut xi: Vec<MultiPoly> = Vec::with_capacity(outer.memory.len() * dim);
            for row in &gather {
                let map: Vec<usize> = row
                    .iter()
                    .flat_map(|&pos| (0..dim).map(move |i| pos * dim + i))
                    .collect();
                for c in in_comps {
                    xi.push(c.remap_variables(&map, nvars));
                }
            }
            let comps = out_comps
                .iter()
                .map(|c| {
                    let s = if xi.is_empty() {
                        c.remap_variables(&[], nvars)
                    } else {
                        c.substitute(&xi)?
                    };
                    Ok(s.reduce_as_function())
                })
                .collect::<Result<Vec<_>>>()?;
            RegularMap::polynomial(alphabet.clone(), alphabet, memory.len(), comps)?
        }
        _ => {
            let nd = alphabet.size().ok_or(Error::InfiniteAlphabet)?;
            let count = tuple_count(nd, memory.len(), TABLE_CAP)?;
            let out_t = outer.rule.lookup_table()?;
            let in_t = inner.rule.lookup_table()?;
            let mut u = vec![0usize; memory.len()];
            let mut entries = Vec::with_capacity(count);
            for code in 0..count {
                decode_tuple(code, nd, &mut u);
                let mid = gather.iter().rev().fold(0usize, |acc, row| {
                    let inner_code = row.iter().rev().fold(0usize, |c, &pos| c * nd + u[pos]);
                    acc * nd + in_t[inner_code] as usize
                });
                entries.push(out_t[mid]);
            }
            RegularMap::table(alphabet.clone(), alphabet, memory.len(), entries)?
        }
    };
    CellularAutomaton::new(group.clone(), memory, rule.with_verification(verification))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_rule_body, Field};
    use crate::automaton::WindowPattern;
    use crate::groups::FiniteSubset;

    fn f(p: u64) -> Field {
        Field::Prime(p)
    }

    /// Pointwise composite on the window `M'M`, via two window applications.
    fn oracle_agrees(outer: &CellularAutomaton, inner: &CellularAutomaton, comp: &CellularAutomaton) {
        let a = outer.alphabet();
        let nd = a.size().unwrap();
        let omega = comp.memory().clone();
        let identity = outer.group().identity();
        let mut u = vec![0usize; omega.len()];
        for code in 0..nd.pow(omega.len() as u32) {
            decode_tuple(code, nd, &mut u);
            let pat = WindowPattern::from_indices(omega.clone(), a, &u).unwrap();
            let mid = inner.apply_window(&pat).unwrap();
            let out = outer.apply_window(&mid).unwrap();
            let direct = comp.rule().apply(pat.values()).unwrap();
            assert_eq!(out.value_at(&identity), Some(&direct));
        }
    }

    #[test]
    fn shift_twice() {
        let s = CellularAutomaton::on_integers(f(3), &[1], "x0_0").unwrap();
        let ss = compose(&s, &s).unwrap();
        assert_eq!(ss.memory(), &FiniteSubset::integers([2]));
        assert_eq!(ss, CellularAutomaton::on_integers(f(3), &[2], "x0_0").unwrap());
    }

    #[test]
    fn xor_twice() {
        let xor = CellularAutomaton::on_integers(f(2), &[0, 1], "x0_0 + x1_0").unwrap();
        let xx = compose(&xor, &xor).unwrap();
        assert_eq!(xx.memory(), &FiniteSubset::interval(0, 2));
        let expected = parse_rule_body("x0_0 + x2_0", f(2), 3, 1).unwrap();
        assert_eq!(xx.rule().polynomials().unwrap(), &[expected]);
        oracle_agrees(&xor, &xor, &xx);
    }

    #[test]
    fn nonlinear_f3_matches_oracle() {
        let a = CellularAutomaton::on_integers(f(3), &[-1, 1], "x0_0^2*x1_0 + 2").unwrap();
        let b = CellularAutomaton::on_integers(f(3), &[0, 2], "x0_0 + x1_0^2 + x0_0*x1_0").unwrap();
        let ab = compose(&a, &b).unwrap();
        oracle_agrees(&a, &b, &ab);
        // every exponent stays below p after reduction
        for c in ab.rule().polynomials().unwrap() {
            assert!(c.terms().all(|(m, _)| m.exponents().iter().all(|&e| e < 3)));
        }
    }

    #[test]
    fn table_and_polynomial_mix() {
        let a = CellularAutomaton::on_integers(f(3), &[0, 1], "x0_0*x1_0 + 1").unwrap();
        let b = CellularAutomaton::on_integers(f(3), &[-1, 0], "x0_0 + 2*x1_0").unwrap();
        let bt = CellularAutomaton::new(b.group().clone(), b.memory().clone(), b.rule().to_table().unwrap()).unwrap();
        let symbolic = compose(&a, &b).unwrap();
        let mixed = compose(&a, &bt).unwrap();
        assert!(symbolic.same_semantics(&mixed).unwrap());
        oracle_agrees(&a, &bt, &mixed);
    }

    #[test]
    fn rational_composition_is_symbolic() {
        let q = Field::Rationals;
        let a = CellularAutomaton::on_integers(q, &[0, 1], "x1_0 - x0_0^2").unwrap();
        let s = CellularAutomaton::on_integers(q, &[1], "x0_0").unwrap();
        let c = compose(&s, &a).unwrap();
        assert_eq!(c, CellularAutomaton::on_integers(q, &[1, 2], "x1_0 - x0_0^2").unwrap());
    }

    #[test]
    fn mismatched_alphabets_rejected() {
        let a = CellularAutomaton::on_integers(f(2), &[0], "x0_0").unwrap();
        let b = CellularAutomaton::on_integers(f(3), &[0], "x0_0").unwrap();
        assert!(compose(&a, &b).is_err());
    }
}
