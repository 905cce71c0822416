//! Injectivity and surjectivity scans over the periodic configurations of
//! a schedule of finite-index subgroups.

use serde::Serialize;

use crate::alphabet::{decode_tuple, Point};
use crate::automaton::{decide_1d, CellularAutomaton};
use crate::error::{Error, Result};
use crate::groups::{coset_space, CosetSpace, FiniteIndexSubgroup, GroupSpec, Schedule};
use crate::limits::{closed_image_probe, ProbeOptions, ProbeOutcome};

use super::{build_tilde, rho, window_image};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ScanOptions {
    pub schedule: Schedule,
    pub probe: ProbeOptions,
    /// Also run the exact 1-D decision when `G = Z`.
    pub cross_check_1d: bool,
}

/// What enumeration of `A^{H\G}` found for one subgroup.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum SubgroupScan {
    Skipped { subgroup: FiniteIndexSubgroup, index: usize },
    Checked { subgroup: FiniteIndexSubgroup, index: usize, injective: bool, surjective: bool },
}

struct Enumeration {
    collision: Option<(Vec<usize>, Vec<usize>)>,
    missing: Option<Vec<usize>>,
}

/// Enumerates `τ̃_H`, stopping at the first collision when asked to.
fn enumerate(ca: &CellularAutomaton, cosets: &CosetSpace, stop_at_collision: bool) -> Result<Option<Enumeration>> {
    let tilde = build_tilde(ca, cosets)?;
    let count = match tilde.state_count() {
        Ok(c) => c,
        Err(Error::CapExceeded { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let nd = ca.alphabet().size().unwrap();
    let index = cosets.index();
    let mut preimage = vec![u32::MAX; count];
    let mut z = vec![0usize; index];
    let mut out = Vec::with_capacity(index);
    let mut collision = None;
    for code in 0..count {
        decode_tuple(code, nd, &mut z);
        tilde.apply_indices(&z, &mut out)?;
        let img = crate::alphabet::encode_tuple(&out, nd);
        if preimage[img] == u32::MAX {
            preimage[img] = code as u32;
        } else if collision.is_none() {
            let mut other = vec![0usize; index];
            decode_tuple(preimage[img] as usize, nd, &mut other);
            collision = Some((other, z.clone()));
            if stop_at_collision {
                break;
            }
        }
    }
    let missing = preimage.iter().position(|&p| p == u32::MAX).map(|code| {
        let mut d = vec![0usize; index];
        decode_tuple(code, nd, &mut d);
        d
    });
    Ok(Some(Enumeration { collision, missing }))
}

pub(crate) fn points(ca: &CellularAutomaton, idx: &[usize]) -> Vec<Point> {
    idx.iter().map(|&i| ca.alphabet().point(i)).collect()
}

fn exact_1d(ca: &CellularAutomaton, opts: &ScanOptions) -> Option<crate::automaton::Decision1d> {
    (opts.cross_check_1d && ca.group() == &GroupSpec::integers())
        .then(|| decide_1d(ca).ok())
        .flatten()
}

/// A pair `z ≠ z'` with `τ̃_H(z) = τ̃_H(z')`, lifted through `ρ_H` and
/// re-verified by window application.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TildeCollision {
    pub subgroup: FiniteIndexSubgroup,
    pub first: Vec<usize>,
    pub second: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InjectivityScan {
    pub scans: Vec<SubgroupScan>,
    pub collision: Option<TildeCollision>,
    /// Exact verdict for `G = Z`, when computed.
    pub exact_injective: Option<bool>,
}

impl InjectivityScan {
    /// `Some(false)` with a certificate, `Some(true)` only through the
    /// exact 1-D decision, `None` when inconclusive at the bound.
    pub fn verdict(&self) -> Option<bool> {
        if self.collision.is_some() {
            Some(false)
        } else {
            self.exact_injective
        }
    }
}

pub(crate) fn verified_collision(ca: &CellularAutomaton, cosets: &CosetSpace, a: &[usize], b: &[usize]) -> Result<bool> {
    let ia = window_image(ca, &rho(cosets, points(ca, a))?)?;
    let ib = window_image(ca, &rho(cosets, points(ca, b))?)?;
    Ok(a != b && ia == ib)
}

pub fn injectivity_scan(ca: &CellularAutomaton, opts: &ScanOptions) -> Result<InjectivityScan> {
    ca.alphabet().size().ok_or(Error::InfiniteAlphabet)?;
    let mut scans = Vec::new();
    let mut collision = None;
    for h in opts.schedule.subgroups(ca.group()) {
        let cosets = coset_space(&h, ca.group())?;
        let index = cosets.index();
        match enumerate(ca, &cosets, true)? {
            None => scans.push(SubgroupScan::Skipped { subgroup: h, index }),
            Some(e) => {
                scans.push(SubgroupScan::Checked {
                    subgroup: h.clone(),
                    index,
                    injective: e.collision.is_none(),
                    surjective: e.collision.is_none(),
                });
                if let Some((a, b)) = e.collision {
                    if !verified_collision(ca, &cosets, &a, &b)? {
                        return Err(Error::Precondition("periodic collision failed re-verification".into()));
                    }
                    collision = Some(TildeCollision { subgroup: h, first: a, second: b });
                    break;
                }
            }
        }
    }
    let exact_injective = exact_1d(ca, opts).map(|d| d.is_injective());
    if let (Some(_), Some(true)) = (&collision, exact_injective) {
        return Err(Error::Precondition("scan and exact decision disagree".into()));
    }
    Ok(InjectivityScan {
        scans,
        collision,
        exact_injective,
    })
}

/// A periodic target outside `τ̃_H(A^{H\G})`, with the window-fiber probe
/// run on it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UncoveredTarget {
    pub subgroup: FiniteIndexSubgroup,
    pub target: Vec<usize>,
    pub probe: ProbeSummary,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum ProbeSummary {
    /// A periodic preimage with a finer period: the coset index and values.
    PreimageFound { index: usize, values: Vec<usize> },
    /// No pattern on this window maps onto the target: an orphan.
    EmptyAtStage { stage: usize, window: crate::groups::FiniteSubset, fiber_sizes: Vec<usize> },
    Undetermined { fiber_sizes: Vec<usize> },
    /// A window fiber outgrew the fiber cap.
    CapExceeded { needed: u128, cap: u128 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurjectivityScan {
    pub scans: Vec<SubgroupScan>,
    pub uncovered: Vec<UncoveredTarget>,
    /// Whether every checked `τ̃_H` was onto.
    pub fix_covered: bool,
    pub exact_surjective: Option<bool>,
}

impl SurjectivityScan {
    /// `Some(false)` on an emptiness certificate, otherwise the exact 1-D
    /// verdict when available, otherwise inconclusive.
    pub fn verdict(&self) -> Option<bool> {
        let orphan = self
            .uncovered
            .iter()
            .any(|u| matches!(u.probe, ProbeSummary::EmptyAtStage { .. }));
        if orphan {
            Some(false)
        } else {
            self.exact_surjective
        }
    }
}

/// Probes per scan; each probe builds a window system.
const MAX_PROBES: usize = 8;

pub fn surjectivity_scan(ca: &CellularAutomaton, opts: &ScanOptions) -> Result<SurjectivityScan> {
    ca.alphabet().size().ok_or(Error::InfiniteAlphabet)?;
    let mut scans = Vec::new();
    let mut uncovered = Vec::new();
    let mut fix_covered = true;
    for h in opts.schedule.subgroups(ca.group()) {
        let cosets = coset_space(&h, ca.group())?;
        let index = cosets.index();
        let Some(e) = enumerate(ca, &cosets, false)? else {
            scans.push(SubgroupScan::Skipped { subgroup: h, index });
            continue;
        };
        scans.push(SubgroupScan::Checked {
            subgroup: h.clone(),
            index,
            injective: e.collision.is_none(),
            surjective: e.missing.is_none(),
        });
        let Some(target) = e.missing else { continue };
        fix_covered = false;
        if uncovered.len() >= MAX_PROBES {
            continue;
        }
        let d = rho(&cosets, points(ca, &target))?;
        let probe = match closed_image_probe(ca, &d, &opts.probe) {
            Err(Error::CapExceeded { needed, cap }) => ProbeSummary::CapExceeded { needed, cap },
            Err(e) => return Err(e),
            Ok(ProbeOutcome::PreimageFound { preimage, .. }) => ProbeSummary::PreimageFound {
                index: preimage.cosets().index(),
                values: preimage
                    .values()
                    .iter()
                    .map(|p| ca.alphabet().index_of(p).unwrap())
                    .collect(),
            },
            Ok(ProbeOutcome::EmptyAtStage { stage, window, fiber_sizes }) => {
                ProbeSummary::EmptyAtStage { stage, window, fiber_sizes }
            }
            Ok(ProbeOutcome::Undetermined { fiber_sizes }) => ProbeSummary::Undetermined { fiber_sizes },
        };
        let orphan = matches!(probe, ProbeSummary::EmptyAtStage { .. });
        uncovered.push(UncoveredTarget { subgroup: h, target, probe });
        if orphan {
            break;
        }
    }
    let exact_surjective = exact_1d(ca, opts).map(|d| d.is_surjective());
    let scan = SurjectivityScan {
        scans,
        uncovered,
        fix_covered,
        exact_surjective,
    };
    if scan.verdict() == Some(false) && exact_surjective == Some(true) {
        return Err(Error::Precondition("orphan certificate contradicts the exact decision".into()));
    }
    Ok(scan)
}
