//! Inverse synthesis from periodic configurations, and certification of a
//! candidate inverse by composing both ways.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{interpolate_dense, solve_linear, Field, LinearSolution, LinearSystem, Monomial, MultiPoly};
use crate::alphabet::{decode_tuple, tuple_count, Alphabet, Point, RegularMap, RuleBody, TABLE_CAP};
use crate::automaton::{compose, minimal_memory, CellularAutomaton};
use crate::error::{Error, Result};
use crate::groups::{coset_space, product_set, CosetSpace, FiniteIndexSubgroup, FiniteSubset, GroupElement, Schedule};

use super::scan::verified_collision;
use super::{build_tilde, TildeCollision};

/// Cap on `|A|^{k·dim}` when turning a table inverse into polynomials.
const INTERPOLATION_CAP: u128 = 1 << 20;

/// Cap on the number of unknown coefficients in one ansatz.
const ANSATZ_UNKNOWN_CAP: usize = 300;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SynthesisOptions {
    pub schedule: Schedule,
    /// Largest total degree tried by the polynomial ansatz over `Q`.
    pub degree_cap: u32,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        SynthesisOptions {
            schedule: Schedule::default(),
            degree_cap: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "note", rename_all = "kebab-case")]
pub enum StepNote {
    /// `|A|^{[G:H]}` or the ansatz exceeds its cap.
    TooLarge,
    /// `τ̃_H` is not injective.
    Collision,
    /// `1_G ∉ N·M`, so no rule on `N` can invert `τ`.
    IdentityUnreachable,
    /// The linear system for `σ∘τ = id` has no solution up to the cap.
    AnsatzInconsistent { degree_cap: u32 },
    /// A candidate was built and failed certification.
    CandidateRejected,
    Certified,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SynthesisStep {
    pub subgroup: FiniteIndexSubgroup,
    pub index: usize,
    #[serde(flatten)]
    pub note: StepNote,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SynthesisOutcome {
    Found {
        inverse: CellularAutomaton,
        subgroup: FiniteIndexSubgroup,
        /// Memory of the candidate before minimization.
        candidate_memory: FiniteSubset,
        certification: Certification,
    },
    /// `τ` is not injective; the collision is re-verified through `ρ_H`.
    NotInjective(TildeCollision),
    Exhausted,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InverseSynthesis {
    pub outcome: SynthesisOutcome,
    pub transcript: Vec<SynthesisStep>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificationMode {
    Exhaustive,
    Symbolic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompositeOrder {
    /// `σ ∘ τ`.
    CandidateAfterAutomaton,
    /// `τ ∘ σ`.
    AutomatonAfterCandidate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompositeCheck {
    pub order: CompositeOrder,
    /// Size of the composite memory, identity included.
    pub memory_size: usize,
    /// Inputs enumerated, or polynomial components compared.
    pub checked: usize,
    /// First input (exhaustive) or component (symbolic) that differs.
    pub violation: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certification {
    pub mode: CertificationMode,
    pub checks: Vec<CompositeCheck>,
}

impl Certification {
    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.violation.is_none())
    }
}

/// Checks `σ∘τ = τ∘σ = id`: exhaustively on the composite tables for
/// finite alphabets, by comparing polynomials for `Q^n`.
pub fn certify_inverse(ca: &CellularAutomaton, candidate: &CellularAutomaton) -> Result<Certification> {
    let mode = if ca.alphabet().is_finite() {
        CertificationMode::Exhaustive
    } else if ca.alphabet().equations().is_empty() {
        CertificationMode::Symbolic
    } else {
        return Err(Error::Precondition(
            "symbolic certification needs an alphabet without equations".into(),
        ));
    };
    let checks = [
        (CompositeOrder::CandidateAfterAutomaton, compose(candidate, ca)?),
        (CompositeOrder::AutomatonAfterCandidate, compose(ca, candidate)?),
    ]
    .into_iter()
    .map(|(order, comp)| check_identity(order, &comp, mode))
    .collect::<Result<Vec<_>>>()?;
    Ok(Certification { mode, checks })
}

fn check_identity(order: CompositeOrder, comp: &CellularAutomaton, mode: CertificationMode) -> Result<CompositeCheck> {
    let group = comp.group();
    let memory = comp.memory().union(&FiniteSubset::from_elements(vec![group.identity()]));
    let comp = comp.with_memory(&memory)?;
    let e = memory.position(&group.identity()).unwrap();
    let alphabet = comp.alphabet();
    let (checked, violation) = match mode {
        CertificationMode::Exhaustive => {
            let nd = alphabet.size().unwrap();
            let count = tuple_count(nd, memory.len(), TABLE_CAP)?;
            let table = comp.rule().lookup_table()?;
            let mut u = vec![0usize; memory.len()];
            let mut violation = None;
            for (code, &out) in table.iter().enumerate().take(count) {
                decode_tuple(code, nd, &mut u);
                if out as usize != u[e] {
                    let shown: Vec<String> = u.iter().map(|&i| alphabet.format_point(&alphabet.point(i))).collect();
                    violation = Some(format!("({}) -> {}", shown.join(", "), alphabet.format_point(&alphabet.point(out as usize))));
                    break;
                }
            }
            (count, violation)
        }
        CertificationMode::Symbolic => {
            let comps = comp.rule().polynomials().expect("rational rules are polynomial");
            let dim = alphabet.dim();
            let field = alphabet.field().unwrap();
            let nvars = memory.len() * dim;
            let violation = comps.iter().enumerate().find_map(|(i, c)| {
                let expected = MultiPoly::var(field, nvars, e * dim + i);
                (c != &expected).then(|| format!("component {i}: {} != {}", show(c, dim), show(&expected, dim)))
            });
            (comps.len(), violation)
        }
    };
    Ok(CompositeCheck {
        order,
        memory_size: memory.len(),
        checked,
        violation,
    })
}

fn show(p: &MultiPoly, dim: usize) -> String {
    p.display_with(|v| crate::algebra::variable_name(v, dim))
}

/// Searches the schedule for `H` and a rule on the centered coset
/// representatives `N` of `H` that inverts `τ`.
///
/// Finite alphabets: `ν(u)` is the identity-coset value of `τ̃_H⁻¹(u)`;
/// a non-injective `τ̃_H` ends the search with a collision. Over `Q` the
/// rule on `N` is solved for by a polynomial ansatz of rising degree.
pub fn synthesize_inverse(ca: &CellularAutomaton, opts: &SynthesisOptions) -> Result<InverseSynthesis> {
    let mut transcript = Vec::new();
    let mut tried_memories: Vec<FiniteSubset> = Vec::new();
    for h in opts.schedule.subgroups(ca.group()) {
        let cosets = coset_space(&h, ca.group())?;
        let index = cosets.index();
        let reps = cosets.centered_representatives();
        let n_set = FiniteSubset::from_elements(reps.clone());
        let step = |note| SynthesisStep {
            subgroup: h.clone(),
            index,
            note,
        };
        let attempt = if ca.alphabet().is_finite() {
            finite_candidate(ca, &cosets, &reps)?
        } else {
            if tried_memories.contains(&n_set) {
                continue;
            }
            tried_memories.push(n_set.clone());
            rational_candidate(ca, &reps, opts.degree_cap)?
        };
        let candidate = match attempt {
            Attempt::Note(note) => {
                transcript.push(step(note));
                continue;
            }
            Attempt::Collision(first, second) => {
                if !verified_collision(ca, &cosets, &first, &second)? {
                    return Err(Error::Precondition("periodic collision failed re-verification".into()));
                }
                transcript.push(step(StepNote::Collision));
                let collision = TildeCollision {
                    subgroup: h,
                    first,
                    second,
                };
                return Ok(InverseSynthesis {
                    outcome: SynthesisOutcome::NotInjective(collision),
                    transcript,
                });
            }
            Attempt::Candidate(c) => c,
        };
        let candidate_memory = candidate.memory().clone();
        let inverse = polynomial_form(&minimal_memory(&candidate)?)?;
        let certification = certify_inverse(ca, &inverse)?;
        if certification.holds() {
            transcript.push(step(StepNote::Certified));
            return Ok(InverseSynthesis {
                outcome: SynthesisOutcome::Found {
                    inverse,
                    subgroup: h,
                    candidate_memory,
                    certification,
                },
                transcript,
            });
        }
        transcript.push(step(StepNote::CandidateRejected));
    }
    Ok(InverseSynthesis {
        outcome: SynthesisOutcome::Exhausted,
        transcript,
    })
}

enum Attempt {
    Note(StepNote),
    Collision(Vec<usize>, Vec<usize>),
    Candidate(CellularAutomaton),
}

fn finite_candidate(ca: &CellularAutomaton, cosets: &CosetSpace, reps: &[GroupElement]) -> Result<Attempt> {
    let tilde = build_tilde(ca, cosets)?;
    let images = match tilde.materialize() {
        Ok(t) => t,
        Err(Error::CapExceeded { .. }) => return Ok(Attempt::Note(StepNote::TooLarge)),
        Err(e) => return Err(e),
    };
    let nd = ca.alphabet().size().unwrap();
    let index = cosets.index();
    let mut inverse = vec![u32::MAX; images.len()];
    for (code, &img) in images.iter().enumerate() {
        let slot = &mut inverse[img as usize];
        if *slot != u32::MAX {
            let (mut a, mut b) = (vec![0; index], vec![0; index]);
            decode_tuple(*slot as usize, nd, &mut a);
            decode_tuple(code, nd, &mut b);
            return Ok(Attempt::Collision(a, b));
        }
        *slot = code as u32;
    }
    // coordinate γ of the state is the value on coset γ, read at reps[γ]
    let identity_coset = cosets.reduce(&ca.group().identity());
    let mut z = vec![0usize; index];
    let entries: Vec<u32> = inverse
        .iter()
        .map(|&pre| {
            decode_tuple(pre as usize, nd, &mut z);
            z[identity_coset] as u32
        })
        .collect();
    let alphabet = ca.alphabet().clone();
    let rule = RegularMap::table(alphabet.clone(), alphabet, index, entries)?;
    Ok(Attempt::Candidate(CellularAutomaton::from_ordered(
        ca.group().clone(),
        reps.to_vec(),
        rule,
    )?))
}

/// Exponent vectors of total degree `<= degree` in `nvars` variables.
fn monomials(nvars: usize, degree: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; nvars];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, degree, &mut cur, &mut out);
    out
}

fn binomial_exceeds(n: usize, k: usize, cap: usize) -> bool {
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n + k - i) as u128 / (i + 1) as u128;
        if acc > cap as u128 {
            return true;
        }
    }
    false
}

fn rational_candidate(ca: &CellularAutomaton, reps: &[GroupElement], degree_cap: u32) -> Result<Attempt> {
    let alphabet = ca.alphabet();
    if !alphabet.equations().is_empty() {
        return Err(Error::Precondition("the ansatz needs an alphabet without equations".into()));
    }
    let comps = ca.rule().polynomials().expect("rational rules are polynomial");
    let group = ca.group();
    let field = alphabet.field().unwrap();
    let dim = alphabet.dim();
    let n_set = FiniteSubset::from_elements(reps.to_vec());
    let nm = product_set(&n_set, ca.memory(), group)?;
    let Some(e) = nm.position(&group.identity()) else {
        return Ok(Attempt::Note(StepNote::IdentityUnreachable));
    };
    let k = reps.len();
    let nvars = nm.len() * dim;
    // xi[a*dim + i]: component i of τ at reps[a], in the variables of N·M
    let mut xi = Vec::with_capacity(k * dim);
    for a in reps {
        let map: Vec<usize> = ca
            .memory()
            .iter()
            .flat_map(|h| {
                let pos = nm.position(&group.op(a, h)).unwrap();
                (0..dim).map(move |i| pos * dim + i)
            })
            .collect();
        xi.extend(comps.iter().map(|c| c.remap_variables(&map, nvars)));
    }

    for degree in 1..=degree_cap {
        if binomial_exceeds(k * dim, degree as usize, ANSATZ_UNKNOWN_CAP) {
            return Ok(Attempt::Note(StepNote::TooLarge));
        }
        let basis = monomials(k * dim, degree);
        let images = basis
            .iter()
            .map(|m| MultiPoly::from_terms(field, k * dim, [(m.clone(), field.one())]).substitute(&xi))
            .collect::<Result<Vec<_>>>()?;
        let mut rows: BTreeMap<Monomial, usize> = BTreeMap::new();
        for p in &images {
            for (m, _) in p.terms() {
                let next = rows.len();
                rows.entry(m.clone()).or_insert(next);
            }
        }
        let mut solved = Vec::with_capacity(dim);
        for j in 0..dim {
            let target = Monomial::var(nvars, e * dim + j);
            let next = rows.len();
            rows.entry(target.clone()).or_insert(next);
            let mut matrix = vec![vec![field.zero(); basis.len()]; rows.len()];
            for (col, p) in images.iter().enumerate() {
                for (m, c) in p.terms() {
                    matrix[rows[m]][col] = c.clone();
                }
            }
            let mut rhs = vec![field.zero(); rows.len()];
            rhs[rows[&target]] = field.one();
            match solve_linear(&LinearSystem::new(field, basis.len(), matrix, rhs)?) {
                LinearSolution::Solved { particular, .. } => solved.push(MultiPoly::from_terms(
                    field,
                    k * dim,
                    basis.iter().cloned().zip(particular).filter(|(_, c)| !c.is_zero()),
                )),
                LinearSolution::Inconsistent { .. } => break,
            }
        }
        if solved.len() == dim {
            let rule = RegularMap::polynomial(alphabet.clone(), alphabet.clone(), k, solved)?;
            return Ok(Attempt::Candidate(CellularAutomaton::from_ordered(
                group.clone(),
                reps.to_vec(),
                rule,
            )?));
        }
    }
    Ok(Attempt::Note(StepNote::AnsatzInconsistent { degree_cap }))
}

/// Table rules over `F_p^n` varieties become polynomial rules (zero off
/// the variety) when the interpolation grid is small enough.
fn polynomial_form(ca: &CellularAutomaton) -> Result<CellularAutomaton> {
    let alphabet: &Arc<Alphabet> = ca.alphabet();
    let (RuleBody::Table(_), Some(Field::Prime(p))) = (ca.rule().body(), alphabet.field()) else {
        return Ok(ca.clone());
    };
    let dim = alphabet.dim();
    let k = ca.memory().len();
    let nvars = k * dim;
    let Ok(size) = tuple_count(p as usize, nvars, INTERPOLATION_CAP) else {
        return Ok(ca.clone());
    };
    let field = Field::Prime(p);
    let mut values = vec![vec![0u64; size]; dim];
    let mut digits = vec![0usize; nvars];
    let mut args = vec![0usize; k];
    'grid: for code in 0..size {
        decode_tuple(code, p as usize, &mut digits);
        for (m, arg) in args.iter_mut().enumerate() {
            let coords = digits[m * dim..(m + 1) * dim]
                .iter()
                .map(|&d| field.from_i64(d as i64))
                .collect();
            match alphabet.index_of(&Point::Coords(coords)) {
                Some(i) => *arg = i,
                None => continue 'grid,
            }
        }
        let out = alphabet.point(ca.rule().apply_indices(&args)?);
        for (j, c) in out.coords().unwrap().iter().enumerate() {
            values[j][code] = c.residue().unwrap();
        }
    }
    let comps = values
        .iter()
        .map(|v| interpolate_dense(p, nvars, v))
        .collect::<Result<Vec<_>>>()?;
    let rule = RegularMap::polynomial(alphabet.clone(), alphabet.clone(), k, comps)?;
    CellularAutomaton::new(ca.group().clone(), ca.memory().clone(), rule)
}
