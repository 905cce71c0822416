//! Window fibers `Z_Ω = τ_Ω⁻¹(d|_{Ω'})` on an increasing window schedule
//! and the resulting closed-image probe.

use serde::Serialize;

use crate::alphabet::{decode_tuple, tuple_count};
use crate::automaton::{CellularAutomaton, WindowPattern};
use crate::error::{Error, Result};
use crate::groups::{
    coset_space, hermite_normal_form, interior, product_set, CosetSpace, FiniteIndexSubgroup, FiniteSubset,
    GroupElement, GroupSpec,
};
use crate::periodic::{build_tilde, rho, PeriodicConfiguration, STATE_CAP};

use super::{limit_thread, FiniteInverseSequence, ThreadOutcome};

/// Default cap on the size of one fiber.
pub const FIBER_CAP: usize = 1 << 18;

/// `Ω_n`: the cube `[-n, n]^d` in `Z^d`; all of `G` for finite groups.
pub fn window_schedule(group: &GroupSpec, n: usize) -> FiniteSubset {
    match group {
        GroupSpec::FreeAbelian { rank } => FiniteSubset::cube(*rank, -(n as i64), n as i64),
        GroupSpec::Finite(_) => FiniteSubset::from_elements(group.elements().unwrap()),
    }
}

/// Extends every pattern of `fiber` (on `old`) to `new ⊃ old` so that the
/// window map hits `target` on `interior(new)`. Returns the extensions and,
/// for each, the index of the pattern it extends.
fn extend_fiber<T>(
    ca: &CellularAutomaton,
    old: &FiniteSubset,
    fiber: &[Vec<usize>],
    new: &FiniteSubset,
    target: T,
    cap: usize,
) -> Result<(Vec<Vec<usize>>, Vec<usize>)>
where
    T: Fn(&GroupElement) -> usize,
{
    let nd = ca.alphabet().size().ok_or(Error::InfiniteAlphabet)?;
    let table = ca.rule().lookup_table()?;
    let group = ca.group();
    let fresh: Vec<usize> = (0..new.len()).filter(|&i| !old.contains(&new.elements()[i])).collect();
    let step_of: Vec<Option<usize>> = {
        let mut s = vec![None; new.len()];
        for (k, &i) in fresh.iter().enumerate() {
            s[i] = Some(k);
        }
        s
    };
    let old_pos: Vec<Option<usize>> = new.iter().map(|g| old.position(g)).collect();
    let old_interior = interior(old, ca.memory(), group)?;
    // constraint: (cells of g·M in `new`, required value), grouped by the
    // step after which all its cells are assigned (0 = before any fresh cell)
    let mut constraints: Vec<Vec<(Vec<usize>, u32)>> = vec![Vec::new(); fresh.len() + 1];
    for g in interior(new, ca.memory(), group)?.iter() {
        if old_interior.contains(g) {
            continue;
        }
        let cells: Vec<usize> = ca
            .memory()
            .iter()
            .map(|h| new.position(&group.op(g, h)).unwrap())
            .collect();
        let stage = cells.iter().filter_map(|&c| step_of[c].map(|k| k + 1)).max().unwrap_or(0);
        constraints[stage].push((cells, target(g) as u32));
    }
    let satisfied = |u: &[usize], stage: usize| {
        constraints[stage].iter().all(|(cells, want)| {
            let code = cells.iter().rev().fold(0usize, |acc, &c| acc * nd + u[c]);
            table[code] == *want
        })
    };

    let mut out = Vec::new();
    let mut parents = Vec::new();
    let mut u = vec![0usize; new.len()];
    for (pi, base) in fiber.iter().enumerate() {
        for (i, p) in old_pos.iter().enumerate() {
            if let Some(p) = p {
                u[i] = base[*p];
            }
        }
        if !satisfied(&u, 0) {
            continue;
        }
        // depth-first over the fresh cells
        let mut k = 0usize;
        let mut next_value = vec![0usize; fresh.len()];
        if fresh.is_empty() {
            out.push(u.clone());
            parents.push(pi);
            continue;
        }
        loop {
            if next_value[k] == nd {
                next_value[k] = 0;
                if k == 0 {
                    break;
                }
                k -= 1;
                continue;
            }
            u[fresh[k]] = next_value[k];
            next_value[k] += 1;
            if !satisfied(&u, k + 1) {
                continue;
            }
            if k + 1 == fresh.len() {
                if out.len() >= cap {
                    return Err(Error::CapExceeded {
                        needed: out.len() as u128 + 1,
                        cap: cap as u128,
                    });
                }
                out.push(u.clone());
                parents.push(pi);
            } else {
                k += 1;
            }
        }
    }
    Ok((out, parents))
}

/// `Z_Ω`: all patterns on `omega` whose window image is `target`, which
/// must live on `interior(omega, M)`.
pub fn window_fibers(
    ca: &CellularAutomaton,
    target: &WindowPattern,
    omega: &FiniteSubset,
    cap: usize,
) -> Result<Vec<Vec<usize>>> {
    let inner = interior(omega, ca.memory(), ca.group())?;
    if target.window() != &inner {
        return Err(Error::Precondition(format!(
            "target window must be {inner}, got {}",
            target.window()
        )));
    }
    let alphabet = ca.alphabet();
    let value = |g: &GroupElement| {
        alphabet
            .index_of(target.value_at(g).expect("cell of the target window"))
            .expect("target values are points")
    };
    let (fiber, _) = extend_fiber(ca, &FiniteSubset::empty(), &[Vec::new()], omega, value, cap)?;
    Ok(fiber)
}

/// Fibers `Z_n` over `Ω_0 ⊂ Ω_1 ⊂ …` for a periodic target, with the
/// restriction maps between them.
#[derive(Clone, Debug)]
pub struct WindowSystem {
    pub windows: Vec<FiniteSubset>,
    pub fibers: Vec<Vec<Vec<usize>>>,
    /// `parents[n][i]`: index in `Z_n` of the restriction of `Z_{n+1}[i]`.
    pub parents: Vec<Vec<usize>>,
}

impl WindowSystem {
    /// Builds stages `0..=stages`, stopping early at the first empty fiber.
    pub fn build(
        ca: &CellularAutomaton,
        target: &PeriodicConfiguration,
        stages: usize,
        cap: usize,
    ) -> Result<Self> {
        if target.cosets().group() != ca.group() {
            return Err(Error::GroupMismatch("target lives on another group".into()));
        }
        let alphabet = ca.alphabet();
        let value = |g: &GroupElement| alphabet.index_of(target.value_at(g)).expect("target values are points");
        let mut windows = Vec::new();
        let mut fibers: Vec<Vec<Vec<usize>>> = Vec::new();
        let mut parents = Vec::new();
        let mut prev_window = FiniteSubset::empty();
        let mut prev_fiber = vec![Vec::new()];
        for n in 0..=stages {
            let w = window_schedule(ca.group(), n);
            let (fiber, par) = extend_fiber(ca, &prev_window, &prev_fiber, &w, value, cap)?;
            if n > 0 {
                parents.push(par);
            }
            windows.push(w.clone());
            fibers.push(fiber.clone());
            if fiber.is_empty() {
                break;
            }
            prev_window = w;
            prev_fiber = fiber;
        }
        Ok(WindowSystem { windows, fibers, parents })
    }

    pub fn sequence(&self) -> FiniteInverseSequence {
        let sizes = self.fibers.iter().map(Vec::len).collect();
        FiniteInverseSequence::new(sizes, self.parents.clone()).expect("restriction maps are well formed")
    }

    pub fn fiber_sizes(&self) -> Vec<usize> {
        self.fibers.iter().map(Vec::len).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeOptions {
    /// Last window stage `n` (window `Ω_n`).
    pub stages: usize,
    pub fiber_cap: usize,
    /// Multiples `k·H` of the target's period lattice searched directly.
    pub search_multiples: usize,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions {
            stages: 8,
            fiber_cap: FIBER_CAP,
            search_multiples: 6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProbeOutcome {
    /// A verified periodic preimage of the target.
    PreimageFound { preimage: PeriodicConfiguration, fiber_sizes: Vec<usize> },
    /// `Z_{Ω_n}` is empty, so the target is outside the closure of the image.
    EmptyAtStage {
        stage: usize,
        window: FiniteSubset,
        fiber_sizes: Vec<usize>,
    },
    /// All fibers up to the last stage are nonempty but no periodic
    /// preimage was found.
    Undetermined { fiber_sizes: Vec<usize> },
}

/// Probes whether a periodic target lies in the (closed) image of `τ`.
pub fn closed_image_probe(
    ca: &CellularAutomaton,
    d: &PeriodicConfiguration,
    opts: &ProbeOptions,
) -> Result<ProbeOutcome> {
    let system = WindowSystem::build(ca, d, opts.stages, opts.fiber_cap)?;
    let fiber_sizes = system.fiber_sizes();
    if let Some(stage) = fiber_sizes.iter().position(|&s| s == 0) {
        return Ok(ProbeOutcome::EmptyAtStage {
            stage,
            window: system.windows[stage].clone(),
            fiber_sizes,
        });
    }
    let seq = system.sequence();
    let horizon = seq.levels() - 1;
    if let ThreadOutcome::Thread { thread } = limit_thread(&seq, horizon)? {
        let top = &system.fibers[horizon][thread[horizon]];
        if let Some(c) = periodic_from_thread(ca, d, &system.windows[horizon], top)? {
            return Ok(ProbeOutcome::PreimageFound {
                preimage: c,
                fiber_sizes,
            });
        }
    }
    for h in multiples(d.cosets(), opts.search_multiples)? {
        if let Some(c) = search_periodic(ca, d, &h)? {
            return Ok(ProbeOutcome::PreimageFound {
                preimage: c,
                fiber_sizes,
            });
        }
    }
    Ok(ProbeOutcome::Undetermined { fiber_sizes })
}

/// For `G = Z` and target period `p`: positions `i < j` with `j - i ≡ 0
/// (mod p)` where the pattern repeats on `r` cells give the periodic
/// candidate `u[i..j]^∞`, kept if it verifies.
fn periodic_from_thread(
    ca: &CellularAutomaton,
    d: &PeriodicConfiguration,
    window: &FiniteSubset,
    u: &[usize],
) -> Result<Option<PeriodicConfiguration>> {
    let (GroupSpec::FreeAbelian { rank: 1 }, FiniteIndexSubgroup::Lattice(l)) = (ca.group(), d.cosets().subgroup())
    else {
        return Ok(None);
    };
    let p = l.matrix()[0][0] as usize;
    let offs: Vec<i64> = ca.memory().iter().map(|h| h.as_vector().unwrap()[0]).collect();
    let r = match (offs.first(), offs.last()) {
        (Some(lo), Some(hi)) => (hi - lo) as usize,
        _ => 0,
    };
    let lo = window.elements()[0].as_vector().unwrap()[0];
    let len = u.len();
    for i in 0..len {
        for j in (i + p..len).step_by(p) {
            if j + r > len || u[i..i + r] != u[j..j + r] {
                continue;
            }
            let q = (j - i) as i64;
            let cosets = coset_space(&FiniteIndexSubgroup::diagonal(1, q), ca.group())?;
            // coset k of qZ holds the cell x ≡ k (mod q)
            let values = (0..q)
                .map(|k| {
                    let x = (lo + i as i64) + (k - (lo + i as i64)).rem_euclid(q);
                    ca.alphabet().point(u[(x - lo) as usize])
                })
                .collect();
            let c = rho(&cosets, values)?;
            if verify_preimage(ca, &c, d)? {
                return Ok(Some(c));
            }
        }
    }
    Ok(None)
}

/// `k·H` for `k = 1..=count` (lattices), or `H` and the trivial subgroup
/// (finite groups).
fn multiples(cosets: &CosetSpace, count: usize) -> Result<Vec<FiniteIndexSubgroup>> {
    Ok(match cosets.subgroup() {
        FiniteIndexSubgroup::Lattice(l) => (1..=count as i64)
            .map(|k| {
                let scaled: Vec<Vec<i64>> = l.matrix().iter().map(|row| row.iter().map(|x| x * k).collect()).collect();
                hermite_normal_form(&scaled).map(FiniteIndexSubgroup::Lattice)
            })
            .collect::<Result<Vec<_>>>()?,
        FiniteIndexSubgroup::Finite(h) => {
            let id = cosets.group().identity();
            let GroupElement::Index(e) = id else { unreachable!() };
            let mut v = vec![FiniteIndexSubgroup::Finite(h.clone())];
            if h.len() > 1 {
                v.push(FiniteIndexSubgroup::Finite(vec![e]));
            }
            v
        }
    })
}

/// Exhaustive search of `A^{H'\G}` for `z` with `τ̃_{H'}(z) = d`, where
/// `H' ⊂ H_d`. Skipped when the state space exceeds the cap.
fn search_periodic(
    ca: &CellularAutomaton,
    d: &PeriodicConfiguration,
    h: &FiniteIndexSubgroup,
) -> Result<Option<PeriodicConfiguration>> {
    let cosets = coset_space(h, ca.group())?;
    let nd = ca.alphabet().size().ok_or(Error::InfiniteAlphabet)?;
    let Ok(count) = tuple_count(nd, cosets.index(), STATE_CAP) else {
        return Ok(None);
    };
    let alphabet = ca.alphabet();
    let want: Vec<usize> = cosets
        .representatives()
        .iter()
        .map(|g| alphabet.index_of(d.value_at(g)).unwrap())
        .collect();
    let tilde = build_tilde(ca, &cosets)?;
    let mut z = vec![0usize; cosets.index()];
    let mut out = Vec::new();
    for code in 0..count {
        decode_tuple(code, nd, &mut z);
        tilde.apply_indices(&z, &mut out)?;
        if out == want {
            let c = rho(&cosets, z.iter().map(|&i| alphabet.point(i)).collect())?;
            if verify_preimage(ca, &c, d)? {
                return Ok(Some(c));
            }
        }
    }
    Ok(None)
}

/// `τ(c) = d` for periodic `c` whose period subgroup lies inside that of
/// `d`: one window application on `R·M` (`R` the representatives of `c`)
/// compared with `d` on `R`.
pub fn verify_preimage(ca: &CellularAutomaton, c: &PeriodicConfiguration, d: &PeriodicConfiguration) -> Result<bool> {
    let reps = FiniteSubset::from_elements(c.cosets().representatives().to_vec());
    let inside = match (c.cosets().subgroup(), d.cosets().subgroup()) {
        (FiniteIndexSubgroup::Lattice(a), FiniteIndexSubgroup::Lattice(b)) => {
            let cols = a.rank();
            (0..cols).all(|j| b.contains(&(0..cols).map(|i| a.matrix()[i][j]).collect::<Vec<_>>()))
        }
        (FiniteIndexSubgroup::Finite(a), FiniteIndexSubgroup::Finite(b)) => a.iter().all(|x| b.contains(x)),
        _ => false,
    };
    if !inside {
        return Err(Error::Precondition("preimage period must refine the target period".into()));
    }
    let omega = product_set(&reps, ca.memory(), ca.group())?;
    let image = ca.apply_window(&c.pattern_on(&omega))?;
    Ok(reps.iter().all(|g| image.value_at(g) == Some(d.value_at(g))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Field;
    use crate::alphabet::Point;

    fn f(p: u64) -> Field {
        Field::Prime(p)
    }

    fn periodic(ca: &CellularAutomaton, k: i64, idx: &[usize]) -> PeriodicConfiguration {
        let cs = coset_space(&FiniteIndexSubgroup::diagonal(1, k), ca.group()).unwrap();
        rho(&cs, idx.iter().map(|&i| ca.alphabet().point(i)).collect()).unwrap()
    }

    fn pattern(ca: &CellularAutomaton, lo: i64, idx: &[usize]) -> WindowPattern {
        let w = FiniteSubset::interval(lo, lo + idx.len() as i64 - 1);
        WindowPattern::from_indices(w, ca.alphabet(), idx).unwrap()
    }

    #[test]
    fn xor_fiber_over_zero() {
        let xor = CellularAutomaton::on_integers(f(2), &[0, 1], "x0_0 + x1_0").unwrap();
        let fib = window_fibers(&xor, &pattern(&xor, 0, &[0]), &FiniteSubset::interval(0, 1), FIBER_CAP).unwrap();
        assert_eq!(fib, vec![vec![0, 0], vec![1, 1]]);
    }

    #[test]
    fn identity_fiber_is_singleton() {
        let id = CellularAutomaton::on_integers(f(3), &[0], "x0_0").unwrap();
        let fib = window_fibers(&id, &pattern(&id, 0, &[2, 0, 1]), &FiniteSubset::interval(0, 2), FIBER_CAP).unwrap();
        assert_eq!(fib, vec![vec![2, 0, 1]]);
    }

    #[test]
    fn shift_fiber_is_the_shifted_target() {
        let s = CellularAutomaton::on_integers(f(3), &[1], "x0_0").unwrap();
        let fib = window_fibers(&s, &pattern(&s, -1, &[1, 2, 0]), &FiniteSubset::interval(0, 2), FIBER_CAP).unwrap();
        assert_eq!(fib, vec![vec![1, 2, 0]]);
        assert!(window_fibers(&s, &pattern(&s, 0, &[1, 2]), &FiniteSubset::interval(0, 2), FIBER_CAP).is_err());
    }

    #[test]
    fn fibers_agree_with_brute_force() {
        let ca = CellularAutomaton::on_integers(f(3), &[-1, 1], "x0_0*x1_0 + x1_0^2").unwrap();
        let omega = FiniteSubset::interval(-2, 3);
        let target = pattern(&ca, -1, &[1, 0, 2, 1]);
        let fib = window_fibers(&ca, &target, &omega, FIBER_CAP).unwrap();
        let mut brute = Vec::new();
        let mut u = vec![0; omega.len()];
        for code in 0..3usize.pow(omega.len() as u32) {
            decode_tuple(code, 3, &mut u);
            let img = ca.apply_window(&WindowPattern::from_indices(omega.clone(), ca.alphabet(), &u).unwrap()).unwrap();
            if img == target {
                brute.push(u.clone());
            }
        }
        let mut fib_sorted = fib.clone();
        fib_sorted.sort();
        brute.sort();
        assert_eq!(fib_sorted, brute);
    }

    #[test]
    fn window_system_restrictions_commute() {
        let xor = CellularAutomaton::on_integers(f(2), &[0, 1], "x0_0 + x1_0").unwrap();
        let d = periodic(&xor, 3, &[1, 0, 0]);
        let sys = WindowSystem::build(&xor, &d, 4, FIBER_CAP).unwrap();
        for n in 0..sys.parents.len() {
            for (i, u) in sys.fibers[n + 1].iter().enumerate() {
                let parent = &sys.fibers[n][sys.parents[n][i]];
                for (k, g) in sys.windows[n].iter().enumerate() {
                    assert_eq!(u[sys.windows[n + 1].position(g).unwrap()], parent[k]);
                }
            }
        }
    }

    #[test]
    fn surjective_rule_finds_preimage() {
        let ca = CellularAutomaton::on_integers(f(3), &[0, 1], "x1_0 + x0_0^2").unwrap();
        let d = periodic(&ca, 2, &[1, 2]);
        match closed_image_probe(&ca, &d, &ProbeOptions::default()).unwrap() {
            ProbeOutcome::PreimageFound { preimage, .. } => assert!(verify_preimage(&ca, &preimage, &d).unwrap()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn constant_rule_empty_at_stage_zero() {
        let ca = CellularAutomaton::on_integers(f(2), &[0], "0").unwrap();
        let d = periodic(&ca, 2, &[1, 0]);
        match closed_image_probe(&ca, &d, &ProbeOptions::default()).unwrap() {
            ProbeOutcome::EmptyAtStage { stage, .. } => assert_eq!(stage, 0),
            other => panic!("{other:?}"),
        }
        // the first window only sees the zero cell
        let d = periodic(&ca, 2, &[0, 1]);
        match closed_image_probe(&ca, &d, &ProbeOptions::default()).unwrap() {
            ProbeOutcome::EmptyAtStage { stage, .. } => assert_eq!(stage, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn xor_all_ones_has_alternating_preimage() {
        let xor = CellularAutomaton::on_integers(f(2), &[0, 1], "x0_0 + x1_0").unwrap();
        let d = periodic(&xor, 1, &[1]);
        match closed_image_probe(&xor, &d, &ProbeOptions::default()).unwrap() {
            ProbeOutcome::PreimageFound { preimage, .. } => {
                assert_eq!(preimage.cosets().index(), 2);
                assert_ne!(preimage.values()[0], preimage.values()[1]);
                assert!(verify_preimage(&xor, &preimage, &d).unwrap());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn finite_group_probe() {
        use crate::alphabet::{Alphabet, RegularMap};
        use crate::groups::FiniteGroup;
        use std::sync::Arc;
        let z3 = GroupSpec::Finite(FiniteGroup::cyclic(3));
        let a = Arc::new(Alphabet::table(vec!["0", "1"]).unwrap());
        let rule = RegularMap::table(a.clone(), a, 2, vec![0, 1, 1, 0]).unwrap();
        let mem = FiniteSubset::new(&z3, vec![GroupElement::Index(0), GroupElement::Index(1)]).unwrap();
        let ca = CellularAutomaton::new(z3.clone(), mem, rule).unwrap();
        let trivial = coset_space(&FiniteIndexSubgroup::Finite(vec![0]), &z3).unwrap();
        // XOR on Z/3: image has even weight, so (1,0,0) is missed
        let d = rho(&trivial, vec![Point::Symbol(1), Point::Symbol(0), Point::Symbol(0)]).unwrap();
        assert!(matches!(
            closed_image_probe(&ca, &d, &ProbeOptions::default()).unwrap(),
            ProbeOutcome::EmptyAtStage { stage: 0, .. }
        ));
        let d = rho(&trivial, vec![Point::Symbol(1), Point::Symbol(1), Point::Symbol(0)]).unwrap();
        assert!(matches!(
            closed_image_probe(&ca, &d, &ProbeOptions::default()).unwrap(),
            ProbeOutcome::PreimageFound { .. }
        ));
    }
}
