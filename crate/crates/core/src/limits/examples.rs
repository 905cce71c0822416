//! Two one-dimensional examples over infinite fields where the image of
//! an automaton fails to be closed.
//!
//! * `τ(c)(n) = c(n+1) - c(n)^2` over `Q`: the constant target `1` has a
//!   preimage on every finite window (the recurrence `c(n+1) = 1 + c(n)^2`)
//!   but no constant preimage, since `t^2 - t + 1` has no rational root.
//!   Over `F_5` the same rule is right-permutive, hence surjective.
//! * `τ(c)(n) = c(n) - t·c(n+1)` over `Q[t]`: with every cell a polynomial
//!   of degree `<= D`, the truncated linear system for the target `1` is
//!   inconsistent while its homogeneous part has only the zero solution.

use serde::Serialize;

use crate::algebra::{rational_roots, solve_linear, Field, FieldElement, LinearSolution, LinearSystem, UniPoly};
use crate::automaton::{decide_1d, CellularAutomaton, WindowPattern};
use crate::alphabet::Point;
use crate::error::{Error, Result};
use crate::groups::FiniteSubset;

/// Largest window length accepted by [`quadratic_example_probe`]; the
/// witness entries square at every step.
pub const QUADRATIC_MAX_WINDOW: usize = 16;

/// Largest degree cap accepted by [`kt_example_probe`].
pub const KT_MAX_DEGREE: usize = 24;

const QUADRATIC_BODY: &str = "x1_0 - x0_0^2";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuadraticReport {
    /// `c(0), …, c(prefix_len)` with `c(0) = 0`, `c(n+1) = 1 + c(n)^2`.
    pub witness_prefix: Vec<String>,
    /// Window lengths `ℓ` for which the witness on `[0, ℓ]` maps onto the
    /// constant `1` on `[0, ℓ-1]`, checked exactly.
    pub windows_verified: Vec<usize>,
    /// Rational roots of `t^2 - t + 1`.
    pub constant_preimages: Vec<String>,
    pub finite_variant_surjective: bool,
    pub finite_variant_injective: bool,
}

/// Reproduces the quadratic example with witness prefix on `[0, prefix_len]`
/// and windows up to length `max_window`.
pub fn quadratic_example_probe(prefix_len: usize, max_window: usize) -> Result<QuadraticReport> {
    if prefix_len.max(max_window) > QUADRATIC_MAX_WINDOW {
        return Err(Error::Precondition(format!(
            "window length is capped at {QUADRATIC_MAX_WINDOW}"
        )));
    }
    let q = Field::Rationals;
    let ca = CellularAutomaton::on_integers(q, &[0, 1], QUADRATIC_BODY)?;
    let one = q.one();
    let len = prefix_len.max(max_window);
    let mut witness = vec![q.zero()];
    for n in 0..len {
        let c = &witness[n];
        witness.push(&one + &(c * c));
    }

    let mut windows_verified = Vec::new();
    for l in 1..=max_window {
        let omega = FiniteSubset::interval(0, l as i64);
        let values = witness[..=l].iter().map(|x| Point::Coords(vec![x.clone()])).collect();
        let image = ca.apply_window(&WindowPattern::new(omega, values)?)?;
        let expected_window = FiniteSubset::interval(0, l as i64 - 1);
        if image.window() == &expected_window
            && image.values().iter().all(|p| p == &Point::Coords(vec![one.clone()]))
        {
            windows_verified.push(l);
        }
    }

    // constant c ≡ t maps to t - t^2; it equals 1 iff t^2 - t + 1 = 0
    let roots = rational_roots(&UniPoly::from_i64(q, &[1, -1, 1]))?;

    let finite = CellularAutomaton::on_integers(Field::prime(5)?, &[0, 1], QUADRATIC_BODY)?;
    let decision = decide_1d(&finite)?;
    Ok(QuadraticReport {
        witness_prefix: witness[..=prefix_len].iter().map(ToString::to_string).collect(),
        windows_verified,
        constant_preimages: roots.iter().map(ToString::to_string).collect(),
        finite_variant_surjective: decision.is_surjective(),
        finite_variant_injective: decision.is_injective(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KtLevel {
    pub degree_cap: usize,
    pub unknowns: usize,
    pub equations: usize,
    /// Whether `c - t·(shifted c) = 1` is solvable on the window.
    pub consistent: bool,
    pub kernel_dimension: usize,
    /// Whether the target `0` is solved by `c = 0` only.
    pub zero_target_only_zero: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KtReport {
    pub levels: Vec<KtLevel>,
}

/// For every `D <= max_degree`: cells `c(0), …, c(D+2)` of degree `<= D`
/// in `t`, equations `c(n) - t·c(n+1) = d(n)` for `n = 0..=D+1`, compared
/// coefficient by coefficient in `t^0, …, t^{D+1}`.
pub fn kt_example_probe(max_degree: usize) -> Result<KtReport> {
    if max_degree > KT_MAX_DEGREE {
        return Err(Error::Precondition(format!("degree cap is limited to {KT_MAX_DEGREE}")));
    }
    let levels = (0..=max_degree).map(kt_level).collect::<Result<Vec<_>>>()?;
    Ok(KtReport { levels })
}

/// `targets` equations `c(n) - t·c(n+1) = target`, on `targets + 1` cells.
fn kt_system(degree: usize, targets: usize, target: i64) -> Result<LinearSystem> {
    let q = Field::Rationals;
    let cells = targets + 1;
    let ncols = cells * (degree + 1);
    let var = |cell: usize, k: usize| cell * (degree + 1) + k;
    let mut matrix = Vec::new();
    let mut rhs = Vec::new();
    for n in 0..targets {
        for k in 0..=degree + 1 {
            let mut row = vec![q.zero(); ncols];
            if k <= degree {
                row[var(n, k)] = q.one();
            }
            if k >= 1 {
                row[var(n + 1, k - 1)] = q.from_i64(-1);
            }
            matrix.push(row);
            rhs.push(if k == 0 { q.from_i64(target) } else { q.zero() });
        }
    }
    LinearSystem::new(q, ncols, matrix, rhs)
}

fn kt_level(degree: usize) -> Result<KtLevel> {
    let sys = kt_system(degree, degree + 2, 1)?;
    let (unknowns, equations) = (sys.ncols(), sys.nrows());
    let consistent = solve_linear(&sys).is_consistent();
    let (kernel_dimension, zero_target_only_zero) = match solve_linear(&kt_system(degree, degree + 2, 0)?) {
        LinearSolution::Solved { particular, kernel } => {
            (kernel.len(), kernel.is_empty() && particular.iter().all(FieldElement::is_zero))
        }
        LinearSolution::Inconsistent { .. } => unreachable!("homogeneous systems are consistent"),
    };
    Ok(KtLevel {
        degree_cap: degree,
        unknowns,
        equations,
        consistent,
        kernel_dimension,
        zero_target_only_zero,
    })
}
