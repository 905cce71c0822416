//! Cellular automata `τ(c)(g) = μ((c(g·h))_{h∈M})`, their window maps,
//! composition, restriction, memory minimization and the exact 1-D
//! decision procedure.

mod compose;
mod decide;
mod memory;
mod restrict;

use std::fmt;
use std::sync::Arc;

pub use compose::compose;
pub use decide::{decide_1d, Decision1d, InjectivityVerdict, OrphanWord, PeriodicCollision, SurjectivityVerdict};
pub use memory::{depends_on, minimal_memory, pad_memory};
pub use restrict::{restrict, SubgroupDescription};

use crate::algebra::{parse_rule_body, Field};
use crate::alphabet::{check_regular_map, sample_tuples, Alphabet, Point, RegularMap, Verification};
use crate::error::{Error, Result};
use crate::groups::{interior, FiniteSubset, GroupElement, GroupSpec};

/// Number of sample tuples used to check rules over infinite alphabets.
pub const RATIONAL_SAMPLES: usize = 64;

/// A cellular automaton over `group` with memory set `memory` (sorted)
/// and local rule `rule: A^memory -> A`. Rule argument `m` is the
/// `m`-th memory element in sorted order.
#[derive(Clone, Debug, PartialEq)]
pub struct CellularAutomaton {
    group: GroupSpec,
    memory: FiniteSubset,
    rule: RegularMap,
}

impl CellularAutomaton {
    /// Checks arity, membership and the codomain condition of the rule
    /// (exhaustively for finite alphabets, on samples otherwise).
    pub fn new(group: GroupSpec, memory: FiniteSubset, rule: RegularMap) -> Result<Self> {
        for h in memory.iter() {
            group.check(h)?;
        }
        if rule.arity() != memory.len() {
            return Err(Error::Arity {
                expected: memory.len(),
                got: rule.arity(),
            });
        }
        if rule.domain() != rule.codomain() {
            return Err(Error::AlphabetMismatch("rule must map A^M to A".into()));
        }
        let rule = if rule.verification() == Verification::Unchecked {
            let samples = if rule.domain().is_finite() {
                Vec::new()
            } else {
                sample_tuples(rule.domain(), rule.arity(), RATIONAL_SAMPLES)
            };
            check_regular_map(&rule, &samples)?
        } else {
            rule
        };
        Ok(CellularAutomaton { group, memory, rule })
    }

    /// Like [`CellularAutomaton::new`], with rule arguments indexed by
    /// `elements` in the given order; the memory is re-sorted.
    pub fn from_ordered(group: GroupSpec, elements: Vec<GroupElement>, rule: RegularMap) -> Result<Self> {
        let memory = FiniteSubset::from_elements(elements.clone());
        if memory.len() != elements.len() {
            return Err(Error::Precondition("memory elements must be distinct".into()));
        }
        let sel: Vec<Option<usize>> = elements.iter().map(|e| memory.position(e)).collect();
        let rule = if sel.iter().enumerate().all(|(i, s)| *s == Some(i)) {
            rule
        } else {
            rule.pull_back(memory.len(), &sel, None)?
        };
        CellularAutomaton::new(group, memory, rule)
    }

    /// The identity automaton: memory `{1_G}`, identity rule.
    pub fn identity(group: GroupSpec, alphabet: Arc<Alphabet>) -> Result<Self> {
        let memory = FiniteSubset::from_elements(vec![group.identity()]);
        CellularAutomaton::new(group, memory, RegularMap::identity(alphabet)?)
    }

    /// A rule on the affine line over `field` with `G = Z`; `body` uses
    /// `x<m>_0` for the `m`-th entry of `memory` as listed.
    pub fn on_integers(field: Field, memory: &[i64], body: &str) -> Result<Self> {
        let alphabet = Arc::new(match field {
            Field::Prime(p) => Alphabet::affine(p, 1)?,
            Field::Rationals => Alphabet::rational(1, Vec::new())?,
        });
        let poly = parse_rule_body(body, field, memory.len(), 1)?;
        let rule = RegularMap::polynomial(alphabet.clone(), alphabet, memory.len(), vec![poly])?;
        let elements = memory.iter().map(|&m| GroupElement::Vector(vec![m])).collect();
        CellularAutomaton::from_ordered(GroupSpec::integers(), elements, rule)
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn memory(&self) -> &FiniteSubset {
        &self.memory
    }

    pub fn rule(&self) -> &RegularMap {
        &self.rule
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        self.rule.domain()
    }

    /// The window map `τ_Ω: A^Ω -> A^{Ω'}`.
    pub fn window_map(&self, omega: &FiniteSubset) -> Result<WindowMap<'_>> {
        let target = interior(omega, &self.memory, &self.group)?;
        let gather = target
            .iter()
            .map(|g| {
                self.memory
                    .iter()
                    .map(|h| omega.position(&self.group.op(g, h)).expect("g·h lies in Ω"))
                    .collect()
            })
            .collect();
        Ok(WindowMap {
            ca: self,
            source: omega.clone(),
            target,
            gather,
        })
    }

    /// `τ_Ω(u)` on `Ω' = {g : gM ⊂ Ω}`.
    pub fn apply_window(&self, u: &WindowPattern) -> Result<WindowPattern> {
        self.window_map(&u.window)?.apply(&u.values)
    }

    /// The same automaton with memory enlarged to `superset`.
    pub fn with_memory(&self, superset: &FiniteSubset) -> Result<Self> {
        if !self.memory.is_subset_of(superset) {
            return Err(Error::Precondition(format!(
                "{} is not a superset of the memory {}",
                superset, self.memory
            )));
        }
        let sel: Vec<Option<usize>> = self.memory.iter().map(|h| superset.position(h)).collect();
        let rule = self.rule.pull_back(superset.len(), &sel, None)?;
        CellularAutomaton::new(self.group.clone(), superset.clone(), rule)
    }

    /// Same semantics, decided by comparing lookup tables on the union
    /// of both memory sets (finite alphabets).
    pub fn same_semantics(&self, other: &CellularAutomaton) -> Result<bool> {
        if self.group != other.group || self.alphabet() != other.alphabet() {
            return Ok(false);
        }
        let union = self.memory.union(&other.memory);
        let a = self.with_memory(&union)?;
        let b = other.with_memory(&union)?;
        Ok(a.rule.lookup_table()? == b.rule.lookup_table()?)
    }

    pub(crate) fn replace_rule(&self, memory: FiniteSubset, rule: RegularMap) -> Result<Self> {
        CellularAutomaton::new(self.group.clone(), memory, rule)
    }
}

impl fmt::Display for CellularAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CA over {} with memory {} on {}", self.group, self.memory, self.alphabet())
    }
}

/// Values of a configuration on a finite window, listed in window order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowPattern {
    window: FiniteSubset,
    values: Vec<Point>,
}

impl WindowPattern {
    pub fn new(window: FiniteSubset, values: Vec<Point>) -> Result<Self> {
        if window.len() != values.len() {
            return Err(Error::Arity {
                expected: window.len(),
                got: values.len(),
            });
        }
        Ok(WindowPattern { window, values })
    }

    /// A pattern of point indices of a finite alphabet.
    pub fn from_indices(window: FiniteSubset, alphabet: &Alphabet, indices: &[usize]) -> Result<Self> {
        let values = indices.iter().map(|&i| alphabet.point(i)).collect();
        WindowPattern::new(window, values)
    }

    pub fn window(&self) -> &FiniteSubset {
        &self.window
    }

    pub fn values(&self) -> &[Point] {
        &self.values
    }

    pub fn value_at(&self, g: &GroupElement) -> Option<&Point> {
        self.window.position(g).map(|i| &self.values[i])
    }

    /// Restriction to a subwindow.
    pub fn restrict(&self, sub: &FiniteSubset) -> Result<Self> {
        let values = sub
            .iter()
            .map(|g| {
                self.value_at(g)
                    .cloned()
                    .ok_or_else(|| Error::Precondition(format!("{g} is outside the window")))
            })
            .collect::<Result<Vec<_>>>()?;
        WindowPattern::new(sub.clone(), values)
    }
}

/// `τ_Ω: A^Ω -> A^{Ω'}`; `gather[k][m]` is the position in `Ω` of
/// `target[k]·memory[m]`.
#[derive(Clone, Debug)]
pub struct WindowMap<'a> {
    ca: &'a CellularAutomaton,
    source: FiniteSubset,
    target: FiniteSubset,
    gather: Vec<Vec<usize>>,
}

impl<'a> WindowMap<'a> {
    pub fn source(&self) -> &FiniteSubset {
        &self.source
    }

    pub fn target(&self) -> &FiniteSubset {
        &self.target
    }

    pub fn apply(&self, values: &[Point]) -> Result<WindowPattern> {
        if values.len() != self.source.len() {
            return Err(Error::Arity {
                expected: self.source.len(),
                got: values.len(),
            });
        }
        let alphabet = self.ca.alphabet();
        if let Some(bad) = values.iter().find(|p| !alphabet.contains(p)) {
            return Err(Error::AlphabetMismatch(format!(
                "{} is not a point of the alphabet",
                alphabet.format_point(bad)
            )));
        }
        let out = self
            .gather
            .iter()
            .map(|idx| {
                let args: Vec<Point> = idx.iter().map(|&i| values[i].clone()).collect();
                self.ca.rule.apply(&args)
            })
            .collect::<Result<Vec<_>>>()?;
        WindowPattern::new(self.target.clone(), out)
    }

    /// Fast path on point indices of a finite alphabet.
    pub fn apply_indices(&self, u: &[usize], out: &mut Vec<usize>) -> Result<()> {
        let table = self.ca.rule.lookup_table()?;
        let nd = self.ca.alphabet().size().ok_or(Error::InfiniteAlphabet)?;
        out.clear();
        for idx in &self.gather {
            let code = idx.iter().rev().fold(0usize, |acc, &i| acc * nd + u[i]);
            out.push(table[code] as usize);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Field;

    pub(crate) fn f(p: u64) -> Field {
        Field::Prime(p)
    }

    #[test]
    fn xor_window_example() {
        let xor = CellularAutomaton::on_integers(f(2), &[0, 1], "x0_0 + x1_0").unwrap();
        let u = WindowPattern::from_indices(FiniteSubset::interval(0, 2), xor.alphabet(), &[1, 0, 1]).unwrap();
        let v = xor.apply_window(&u).unwrap();
        assert_eq!(v.window(), &FiniteSubset::interval(0, 1));
        let idx: Vec<usize> = v.values().iter().map(|p| xor.alphabet().index_of(p).unwrap()).collect();
        assert_eq!(idx, vec![1, 1]);
    }

    #[test]
    fn identity_window_is_identity() {
        let id = CellularAutomaton::identity(GroupSpec::integers(), Arc::new(Alphabet::affine(3, 1).unwrap())).unwrap();
        let u = WindowPattern::from_indices(FiniteSubset::interval(-1, 2), id.alphabet(), &[2, 0, 1, 1]).unwrap();
        assert_eq!(id.apply_window(&u).unwrap(), u);
    }

    #[test]
    fn small_window_gives_empty_pattern() {
        let ca = CellularAutomaton::on_integers(f(2), &[0, 5], "x0_0 * x1_0").unwrap();
        let u = WindowPattern::from_indices(FiniteSubset::interval(0, 3), ca.alphabet(), &[1, 1, 0, 1]).unwrap();
        let v = ca.apply_window(&u).unwrap();
        assert!(v.window().is_empty() && v.values().is_empty());
    }

    #[test]
    fn from_ordered_permutes_arguments() {
        let a = CellularAutomaton::on_integers(f(3), &[1, 0], "x0_0 + 2*x1_0^2").unwrap();
        let b = CellularAutomaton::on_integers(f(3), &[0, 1], "2*x0_0^2 + x1_0").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_codomain_violation() {
        use crate::alphabet::{enumerate_points, ENUMERATION_CAP};
        let eq = parse_rule_body("x0_0^2 - 1", f(5), 1, 1).unwrap();
        let a = Arc::new(enumerate_points(5, 1, vec![eq], ENUMERATION_CAP).unwrap());
        let body = parse_rule_body("x0_0 + 1", f(5), 1, 1).unwrap();
        let rule = RegularMap::polynomial(a.clone(), a, 1, vec![body]).unwrap();
        let r = CellularAutomaton::new(GroupSpec::integers(), FiniteSubset::integers([0]), rule);
        assert!(matches!(r, Err(Error::CodomainViolation { .. })));
    }

    #[test]
    fn rational_rules_are_sample_checked() {
        let q = CellularAutomaton::on_integers(Field::Rationals, &[0, 1], "x1_0 - x0_0^2").unwrap();
        assert!(matches!(q.rule().verification(), Verification::VerifiedOnSamples { samples } if samples > 0));
    }
}
