//! Periodic configurations `Fix(H)`, the identification `ρ_H` with
//! `A^{H\G}`, and the finite map `τ̃_H` conjugate to `τ` on `Fix(H)`.

mod inverse;
mod scan;

use crate::algebra::MultiPoly;
use crate::alphabet::{decode_tuple, encode_tuple, sample_tuples, Point, RuleBody};
use crate::automaton::{CellularAutomaton, WindowPattern};
use crate::error::{Error, Result};
use crate::groups::{product_set, CosetSpace, FiniteSubset, GroupElement};

pub use inverse::{
    certify_inverse, synthesize_inverse, Certification, CertificationMode, CompositeCheck, CompositeOrder,
    InverseSynthesis, StepNote, SynthesisOptions, SynthesisOutcome, SynthesisStep,
};
pub use scan::{
    injectivity_scan, surjectivity_scan, InjectivityScan, ProbeSummary, ScanOptions, SubgroupScan,
    SurjectivityScan, TildeCollision, UncoveredTarget,
};

/// Cap on `|A|^{[G:H]}` for exhaustive enumeration of `A^{H\G}`.
pub const STATE_CAP: u128 = 1 << 22;

/// An `H`-periodic configuration: `values[i]` is its value on the `i`-th
/// coset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicConfiguration {
    cosets: CosetSpace,
    values: Vec<Point>,
}

/// `ρ_H(z)`: the configuration `g ↦ z(Hg)`.
pub fn rho(cosets: &CosetSpace, z: Vec<Point>) -> Result<PeriodicConfiguration> {
    if z.len() != cosets.index() {
        return Err(Error::Arity {
            expected: cosets.index(),
            got: z.len(),
        });
    }
    Ok(PeriodicConfiguration {
        cosets: cosets.clone(),
        values: z,
    })
}

impl PeriodicConfiguration {
    pub fn cosets(&self) -> &CosetSpace {
        &self.cosets
    }

    /// `ρ_H⁻¹`: the values on the cosets.
    pub fn values(&self) -> &[Point] {
        &self.values
    }

    pub fn value_at(&self, g: &GroupElement) -> &Point {
        &self.values[self.cosets.reduce(g)]
    }

    /// Restriction to a finite window.
    pub fn pattern_on(&self, window: &FiniteSubset) -> WindowPattern {
        let values = window.iter().map(|g| self.value_at(g).clone()).collect();
        WindowPattern::new(window.clone(), values).expect("one value per cell")
    }
}

/// `τ̃_H` on `A^{H\G}`; coordinate `γ` reads the cosets `deps[γ]`, the
/// reductions of `γ·h` for `h ∈ M`.
#[derive(Clone, Debug)]
pub struct FiniteShiftMap<'a> {
    ca: &'a CellularAutomaton,
    cosets: CosetSpace,
    deps: Vec<Vec<usize>>,
}

pub fn build_tilde<'a>(ca: &'a CellularAutomaton, cosets: &CosetSpace) -> Result<FiniteShiftMap<'a>> {
    if cosets.group() != ca.group() {
        return Err(Error::GroupMismatch(format!("{} vs {}", cosets.group(), ca.group())));
    }
    let deps = cosets
        .representatives()
        .iter()
        .map(|g| {
            ca.memory()
                .iter()
                .map(|h| cosets.reduce(&ca.group().op(g, h)))
                .collect()
        })
        .collect();
    Ok(FiniteShiftMap {
        ca,
        cosets: cosets.clone(),
        deps,
    })
}

impl<'a> FiniteShiftMap<'a> {
    pub fn cosets(&self) -> &CosetSpace {
        &self.cosets
    }

    pub fn dependencies(&self) -> &[Vec<usize>] {
        &self.deps
    }

    /// `|A|^{[G:H]}`, checked against [`STATE_CAP`].
    pub fn state_count(&self) -> Result<usize> {
        let nd = self.ca.alphabet().size().ok_or(Error::InfiniteAlphabet)?;
        crate::alphabet::tuple_count(nd, self.cosets.index(), STATE_CAP)
    }

    pub fn apply(&self, z: &[Point]) -> Result<Vec<Point>> {
        if z.len() != self.cosets.index() {
            return Err(Error::Arity {
                expected: self.cosets.index(),
                got: z.len(),
            });
        }
        self.deps
            .iter()
            .map(|d| {
                let args: Vec<Point> = d.iter().map(|&i| z[i].clone()).collect();
                self.ca.rule().apply(&args)
            })
            .collect()
    }

    /// Finite alphabets: `τ̃_H` on point indices.
    pub fn apply_indices(&self, z: &[usize], out: &mut Vec<usize>) -> Result<()> {
        let table = self.ca.rule().lookup_table()?;
        let nd = self.ca.alphabet().size().ok_or(Error::InfiniteAlphabet)?;
        out.clear();
        for d in &self.deps {
            let code = d.iter().rev().fold(0usize, |acc, &i| acc * nd + z[i]);
            out.push(table[code] as usize);
        }
        Ok(())
    }

    /// Image code of every state code (finite alphabets).
    pub fn materialize(&self) -> Result<Vec<u32>> {
        let count = self.state_count()?;
        let nd = self.ca.alphabet().size().unwrap();
        let mut z = vec![0usize; self.cosets.index()];
        let mut out = Vec::with_capacity(z.len());
        (0..count)
            .map(|code| {
                decode_tuple(code, nd, &mut z);
                self.apply_indices(&z, &mut out)?;
                Ok(encode_tuple(&out, nd) as u32)
            })
            .collect()
    }

    /// Polynomial family: coordinate `γ`, component `i` of the output in
    /// variables `(coset, coordinate)` at index `coset * dim + i`.
    pub fn polynomials(&self) -> Result<Vec<Vec<MultiPoly>>> {
        let RuleBody::Polynomial(comps) = self.ca.rule().body() else {
            return Err(Error::Precondition("table rules have no polynomial form".into()));
        };
        let dim = self.ca.alphabet().dim();
        let nvars = self.cosets.index() * dim;
        Ok(self
            .deps
            .iter()
            .map(|d| {
                let map: Vec<usize> = d.iter().flat_map(|&c| (0..dim).map(move |i| c * dim + i)).collect();
                comps.iter().map(|c| c.remap_variables(&map, nvars)).collect()
            })
            .collect())
    }
}

/// `τ(c)` on the canonical coset representatives, for `c ∈ Fix(H)`,
/// computed by window application on `R·M`.
pub fn window_image(ca: &CellularAutomaton, config: &PeriodicConfiguration) -> Result<Vec<Point>> {
    let cosets = config.cosets();
    let reps = FiniteSubset::from_elements(cosets.representatives().to_vec());
    let omega = product_set(&reps, ca.memory(), ca.group())?;
    let image = ca.apply_window(&config.pattern_on(&omega))?;
    Ok(cosets
        .representatives()
        .iter()
        .map(|g| image.value_at(g).expect("R ⊂ interior(R·M)").clone())
        .collect())
}

/// Result of comparing a candidate `τ̃_H` against `ρ_H⁻¹ ∘ τ ∘ ρ_H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConjugationOutcome {
    Holds { checked: usize, exhaustive: bool },
    Violated { witness: Vec<Point> },
}

impl ConjugationOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, ConjugationOutcome::Holds { .. })
    }
}

/// Checks `τ̃_H = ρ_H⁻¹ ∘ τ ∘ ρ_H`, exhaustively for finite alphabets and
/// on sample states otherwise.
pub fn conjugation_check(ca: &CellularAutomaton, cosets: &CosetSpace) -> Result<ConjugationOutcome> {
    let tilde = build_tilde(ca, cosets)?;
    conjugation_check_against(ca, cosets, |z| tilde.apply(z))
}

/// As [`conjugation_check`] for an arbitrary candidate map on `A^{H\G}`.
/// `τ(ρ_H(z))` is evaluated by one window application on `R·M`, `R` the
/// canonical coset representatives.
pub fn conjugation_check_against<F>(
    ca: &CellularAutomaton,
    cosets: &CosetSpace,
    mut candidate: F,
) -> Result<ConjugationOutcome>
where
    F: FnMut(&[Point]) -> Result<Vec<Point>>,
{
    let reps = FiniteSubset::from_elements(cosets.representatives().to_vec());
    let omega = product_set(&reps, ca.memory(), ca.group())?;
    let map = ca.window_map(&omega)?;
    let positions: Vec<usize> = cosets
        .representatives()
        .iter()
        .map(|g| map.target().position(g).expect("R ⊂ interior(R·M)"))
        .collect();
    let alphabet = ca.alphabet();
    let index = cosets.index();
    let check = |z: Vec<Point>, candidate: &mut F| -> Result<Option<Vec<Point>>> {
        let config = rho(cosets, z)?;
        let image = map.apply(config.pattern_on(&omega).values())?;
        let expected: Vec<Point> = positions.iter().map(|&p| image.values()[p].clone()).collect();
        let got = candidate(config.values())?;
        Ok((got != expected).then(|| config.values().to_vec()))
    };
    let (states, exhaustive): (Box<dyn Iterator<Item = Vec<Point>>>, bool) = match alphabet.size() {
        Some(nd) => {
            let count = crate::alphabet::tuple_count(nd, index, STATE_CAP)?;
            let a = alphabet.clone();
            (
                Box::new((0..count).map(move |code| {
                    let mut z = vec![0usize; index];
                    decode_tuple(code, nd, &mut z);
                    z.into_iter().map(|i| a.point(i)).collect()
                })),
                true,
            )
        }
        None => (Box::new(sample_tuples(alphabet, index, 64).into_iter()), false),
    };
    let mut checked = 0;
    for z in states {
        if let Some(witness) = check(z, &mut candidate)? {
            return Ok(ConjugationOutcome::Violated { witness });
        }
        checked += 1;
    }
    Ok(ConjugationOutcome::Holds { checked, exhaustive })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Field;
    use crate::alphabet::Alphabet;
    use crate::groups::{coset_space, FiniteIndexSubgroup, GroupSpec};
    use std::sync::Arc;

    fn f(p: u64) -> Field {
        Field::Prime(p)
    }

    fn kz(k: i64) -> CosetSpace {
        coset_space(&FiniteIndexSubgroup::diagonal(1, k), &GroupSpec::integers()).unwrap()
    }

    fn pts(a: &Alphabet, idx: &[usize]) -> Vec<Point> {
        idx.iter().map(|&i| a.point(i)).collect()
    }

    #[test]
    fn rho_examples() {
        let a = Alphabet::table(vec!["a", "b"]).unwrap();
        let c = rho(&kz(2), pts(&a, &[0, 1])).unwrap();
        assert_eq!(c.value_at(&GroupElement::Vector(vec![5])), &Point::Symbol(1));
        assert_eq!(c.value_at(&GroupElement::Vector(vec![-4])), &Point::Symbol(0));
        let constant = rho(&kz(1), pts(&a, &[1])).unwrap();
        for n in -3..3 {
            assert_eq!(constant.value_at(&GroupElement::Vector(vec![n])), &Point::Symbol(1));
        }
        assert!(rho(&kz(3), pts(&a, &[0])).is_err());
    }

    #[test]
    fn rho_reads_back() {
        let a = Alphabet::affine(3, 1).unwrap();
        let cs = kz(4);
        let z = pts(&a, &[2, 0, 1, 1]);
        let c = rho(&cs, z.clone()).unwrap();
        let back: Vec<Point> = cs.representatives().iter().map(|g| c.value_at(g).clone()).collect();
        assert_eq!(back, z);
    }

    #[test]
    fn xor_tilde_on_period_two() {
        let xor = CellularAutomaton::on_integers(f(2), &[0, 1], "x0_0 + x1_0").unwrap();
        let t = build_tilde(&xor, &kz(2)).unwrap();
        let table = t.materialize().unwrap();
        // (z0, z1) -> (z0 + z1, z1 + z0): codes 0,3 -> 0 and 1,2 -> 3
        assert_eq!(table, vec![0, 3, 3, 0]);
        assert!(conjugation_check(&xor, &kz(2)).unwrap().holds());
    }

    #[test]
    fn shift_tilde_rotates() {
        let s = CellularAutomaton::on_integers(f(3), &[1], "x0_0").unwrap();
        let t = build_tilde(&s, &kz(3)).unwrap();
        let a = s.alphabet();
        let out = t.apply(&pts(a, &[0, 1, 2])).unwrap();
        assert_eq!(out, pts(a, &[1, 2, 0]));
    }

    #[test]
    fn cube_tilde_is_a_permutation() {
        let c = CellularAutomaton::on_integers(f(5), &[0], "x0_0^3").unwrap();
        let mut table = build_tilde(&c, &kz(3)).unwrap().materialize().unwrap();
        table.sort_unstable();
        assert_eq!(table, (0..125).collect::<Vec<u32>>());
    }

    #[test]
    fn identity_conjugation_holds_in_the_plane() {
        let z2 = GroupSpec::free_abelian(2).unwrap();
        let id = CellularAutomaton::identity(z2.clone(), Arc::new(Alphabet::affine(2, 1).unwrap())).unwrap();
        let l = crate::groups::hermite_normal_form(&[vec![2, 1], vec![0, 2]]).unwrap();
        let cs = coset_space(&FiniteIndexSubgroup::Lattice(l), &z2).unwrap();
        assert!(conjugation_check(&id, &cs).unwrap().holds());
    }

    #[test]
    fn corrupted_tilde_is_caught() {
        let xor = CellularAutomaton::on_integers(f(2), &[0, 1], "x0_0 + x1_0").unwrap();
        let cs = kz(2);
        let t = build_tilde(&xor, &cs).unwrap();
        let a = xor.alphabet().clone();
        let bad = pts(&a, &[1, 0]);
        let outcome = conjugation_check_against(&xor, &cs, |z| {
            let mut out = t.apply(z)?;
            if z == bad.as_slice() {
                out[0] = a.point(0);
            }
            Ok(out)
        })
        .unwrap();
        assert_eq!(outcome, ConjugationOutcome::Violated { witness: bad });
    }

    #[test]
    fn rational_conjugation_on_samples() {
        let q = CellularAutomaton::on_integers(Field::Rationals, &[0, 1], "x1_0 - x0_0^2").unwrap();
        match conjugation_check(&q, &kz(3)).unwrap() {
            ConjugationOutcome::Holds { checked, exhaustive } => assert!(checked > 0 && !exhaustive),
            other => panic!("{other:?}"),
        }
    }
}
