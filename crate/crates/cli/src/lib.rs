//! Command-line front end: rule files in, JSON reports out.
//!
//! Exit codes: 0 when every verdict is definite (positive or negative), 2
//! when some verdict is inconclusive at the search bound, 1 on errors.

pub mod rulefile;
pub mod report;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use algca::alphabet::{Alphabet, Point, Verification};
use algca::automaton::{
    compose, decide_1d, minimal_memory, restrict, CellularAutomaton, InjectivityVerdict, SubgroupDescription,
    SurjectivityVerdict, WindowPattern,
};
use algca::groups::{coset_space, hermite_normal_form, CosetSpace, FiniteIndexSubgroup, FiniteSubset, GroupSpec, Schedule};
use algca::limits::{closed_image_probe, kt_example_probe, quadratic_example_probe, ProbeOptions, ProbeOutcome};
use algca::periodic::{
    build_tilde, certify_inverse, conjugation_check, injectivity_scan, rho, surjectivity_scan, synthesize_inverse,
    ConjugationOutcome, ScanOptions, SynthesisOptions, SynthesisOutcome,
};

use report::{sha256_hex, InputFile, Provenance, Report, Verdict};
use rulefile::{format_element, parse_elements, parse_rule_file, write_rule_file, RuleFileError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}: {source}")]
    RuleFile { path: String, source: RuleFileError },
    #[error("bad argument: {0}")]
    Argument(String),
    #[error(transparent)]
    Core(#[from] algca::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "algca", version, about = "Cellular automata over algebraic alphabets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    /// Largest subgroup index searched; also caps the diagonal multiples.
    #[arg(long)]
    pub index_bound: Option<usize>,
    /// Subgroup schedule, e.g. `diag:8,index:32`.
    #[arg(long)]
    pub schedule: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ExampleName {
    /// `c(n+1) - c(n)^2` over Q.
    Quadratic,
    /// `c(n) - t·c(n+1)` over Q[t].
    Kt,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Group, alphabet, memory and canonical text of a rule file.
    Info { rule: PathBuf },
    /// `outer ∘ inner`.
    Compose { outer: PathBuf, inner: PathBuf },
    /// Restriction to a subgroup containing the memory.
    Restrict {
        rule: PathBuf,
        /// Lattice generators `a,b;c,d` (empty for the trivial group), or
        /// element indices `0,3` of a finite group.
        #[arg(long)]
        subgroup: String,
    },
    /// Smallest memory set.
    MinMemory { rule: PathBuf },
    /// Applies the automaton to a pattern on a finite window.
    Apply {
        rule: PathBuf,
        /// Window cells, `;`-separated.
        #[arg(long)]
        cells: String,
        /// Values on the cells, `;`-separated; random when omitted.
        #[arg(long)]
        values: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// The map induced on configurations fixed by a subgroup.
    Fix {
        rule: PathBuf,
        /// Lattice basis rows `a,b;c,d` (or `k` for `kZ^d`), or element
        /// indices of a finite group.
        #[arg(long)]
        subgroup: String,
    },
    /// Searches periodic configurations for injectivity and surjectivity
    /// certificates.
    Scan {
        rule: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
        /// Window stages for the closed-image probe.
        #[arg(long)]
        window: Option<usize>,
    },
    /// Synthesizes and certifies an inverse automaton.
    Invert {
        rule: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
        /// Degree cap for the polynomial ansatz over Q.
        #[arg(long)]
        degree_cap: Option<u32>,
    },
    /// Checks that `candidate` inverts `rule` both ways.
    Certify { rule: PathBuf, candidate: PathBuf },
    /// Window-fiber probe for a periodic target.
    Probe {
        rule: PathBuf,
        #[arg(long)]
        subgroup: String,
        /// Target values per coset, in the order of the representatives
        /// printed by `fix`.
        #[arg(long)]
        target: String,
        #[arg(long)]
        window: Option<usize>,
    },
    /// Exact injectivity and surjectivity decision for G = Z.
    #[command(name = "decide-1d")]
    Decide1d { rule: PathBuf },
    /// Reproduces the non-closed-image examples.
    Examples {
        which: ExampleName,
        /// Largest window length (quadratic example).
        #[arg(long)]
        window: Option<usize>,
        /// Largest degree cap (Q[t] example).
        #[arg(long)]
        degree_cap: Option<usize>,
    },
}

struct Loaded {
    ca: CellularAutomaton,
    input: InputFile,
}

fn load(path: &Path) -> CliResult<Loaded> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: shown.clone(),
        message: e.to_string(),
    })?;
    let ca = parse_rule_file(&text).map_err(|source| CliError::RuleFile {
        path: shown.clone(),
        source,
    })?;
    Ok(Loaded {
        ca,
        input: InputFile {
            path: shown,
            sha256: sha256_hex(text.as_bytes()),
        },
    })
}

pub fn parse_schedule(text: &str) -> CliResult<Schedule> {
    let mut s = Schedule::default();
    for part in text.split(',') {
        let bad = || CliError::Argument(format!("schedule entry `{part}`; expected diag:<k> or index:<k>"));
        let (key, value) = part.trim().split_once(':').ok_or_else(bad)?;
        let value: usize = value.trim().parse().map_err(|_| bad())?;
        match key.trim() {
            "diag" => s.diagonal_max = value,
            "index" => s.index_bound = value,
            _ => return Err(bad()),
        }
    }
    Ok(s)
}

fn schedule(args: &SearchArgs) -> CliResult<Schedule> {
    let mut s = match &args.schedule {
        Some(t) => parse_schedule(t)?,
        None => Schedule::default(),
    };
    if let Some(k) = args.index_bound {
        s.index_bound = k;
        s.diagonal_max = s.diagonal_max.min(k);
    }
    Ok(s)
}

fn int_rows(text: &str) -> CliResult<Vec<Vec<i64>>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(';')
        .map(|row| {
            row.split(',')
                .map(|x| {
                    x.trim()
                        .parse()
                        .map_err(|_| CliError::Argument(format!("`{x}` in subgroup `{text}`")))
                })
                .collect()
        })
        .collect()
}

fn indices(text: &str) -> CliResult<Vec<usize>> {
    let mut v: Vec<usize> = text
        .split(',')
        .map(|x| x.trim().parse().map_err(|_| CliError::Argument(format!("`{x}` in subgroup `{text}`"))))
        .collect::<CliResult<_>>()?;
    v.sort_unstable();
    v.dedup();
    Ok(v)
}

/// A finite-index subgroup from `--subgroup`.
pub fn parse_subgroup(text: &str, group: &GroupSpec) -> CliResult<FiniteIndexSubgroup> {
    match group {
        GroupSpec::FreeAbelian { rank } => {
            let rows = int_rows(text)?;
            if rows.len() == 1 && rows[0].len() == 1 && *rank > 1 {
                return Ok(FiniteIndexSubgroup::diagonal(*rank, rows[0][0]));
            }
            Ok(FiniteIndexSubgroup::Lattice(hermite_normal_form(&rows)?))
        }
        GroupSpec::Finite(_) => Ok(FiniteIndexSubgroup::Finite(indices(text)?)),
    }
}

fn points(alphabet: &Alphabet, idx: &[usize]) -> Vec<String> {
    idx.iter().map(|&i| alphabet.format_point(&alphabet.point(i))).collect()
}

fn point_values(alphabet: &Alphabet, values: &[Point]) -> Vec<String> {
    values.iter().map(|p| alphabet.format_point(p)).collect()
}

fn elements(s: &FiniteSubset) -> Vec<String> {
    s.iter().map(format_element).collect()
}

fn provenance(v: Verification) -> Option<Provenance> {
    match v {
        Verification::Exhaustive => Some(Provenance::Exhaustive),
        Verification::VerifiedOnSamples { .. } => Some(Provenance::VerifiedOnSamples),
        Verification::Unchecked => None,
    }
}

fn regular_map_verdict(ca: &CellularAutomaton) -> Verdict {
    match provenance(ca.rule().verification()) {
        Some(p) => Verdict::definite("regular-map", true, p),
        None => Verdict::inconclusive("regular-map"),
    }
}

fn describe(ca: &CellularAutomaton) -> Value {
    json!({
        "group": ca.group().to_string(),
        "alphabet": ca.alphabet().to_string(),
        "memory": elements(ca.memory()),
        "rule_file": write_rule_file(ca),
    })
}

fn coset_json(cosets: &CosetSpace) -> Value {
    json!({
        "subgroup": cosets.subgroup(),
        "index": cosets.index(),
        "representatives": cosets.representatives().iter().map(format_element).collect::<Vec<_>>(),
    })
}

fn require_1d(ca: &CellularAutomaton) -> CliResult<()> {
    if ca.group() != &GroupSpec::integers() {
        return Err(CliError::Argument(format!("this command needs G = Z, not {}", ca.group())));
    }
    Ok(())
}

/// Runs one command and builds its report.
pub fn run(cli: &Cli) -> CliResult<Report> {
    match &cli.command {
        Command::Info { rule } => {
            let l = load(rule)?;
            let mut r = Report::new("info", vec![l.input], json!({}));
            r.verdicts.push(regular_map_verdict(&l.ca));
            r.result = describe(&l.ca);
            Ok(r)
        }
        Command::Compose { outer, inner } => {
            let (a, b) = (load(outer)?, load(inner)?);
            let c = compose(&a.ca, &b.ca)?;
            let mut r = Report::new("compose", vec![a.input, b.input], json!({}));
            r.verdicts.push(regular_map_verdict(&c));
            r.result = describe(&c);
            Ok(r)
        }
        Command::Restrict { rule, subgroup } => {
            let l = load(rule)?;
            let desc = match l.ca.group() {
                GroupSpec::FreeAbelian { .. } => SubgroupDescription::LatticeBasis(int_rows(subgroup)?),
                GroupSpec::Finite(_) => SubgroupDescription::Elements(indices(subgroup)?),
            };
            let c = restrict(&l.ca, &desc)?;
            let mut r = Report::new("restrict", vec![l.input], json!({ "subgroup": desc }));
            r.verdicts.push(regular_map_verdict(&c));
            r.result = describe(&c);
            Ok(r)
        }
        Command::MinMemory { rule } => {
            let l = load(rule)?;
            let m = minimal_memory(&l.ca)?;
            let mut r = Report::new("min-memory", vec![l.input], json!({}));
            let reduced = m.memory().len() < l.ca.memory().len();
            r.verdicts.push(Verdict::definite("memory-reduced", reduced, Provenance::Exhaustive));
            r.result = json!({
                "original_memory": elements(l.ca.memory()),
                "minimal": describe(&m),
            });
            Ok(r)
        }
        Command::Apply { rule, cells, values, seed } => {
            let l = load(rule)?;
            let alphabet = l.ca.alphabet().clone();
            let window = FiniteSubset::new(l.ca.group(), parse_elements(cells, l.ca.group())?)?;
            let pattern = match values {
                Some(v) => {
                    let cell_list = parse_elements(cells, l.ca.group())?;
                    let vals = v
                        .split(';')
                        .map(|t| alphabet.parse_point(t))
                        .collect::<algca::Result<Vec<_>>>()?;
                    if vals.len() != cell_list.len() {
                        return Err(CliError::Argument(format!(
                            "{} values for {} cells",
                            vals.len(),
                            cell_list.len()
                        )));
                    }
                    // values follow the cells as listed
                    let mut ordered = vec![None; window.len()];
                    for (g, p) in cell_list.iter().zip(vals) {
                        ordered[window.position(g).unwrap()] = Some(p);
                    }
                    let ordered = ordered
                        .into_iter()
                        .map(|p| p.ok_or_else(|| CliError::Argument("repeated cell".into())))
                        .collect::<CliResult<Vec<_>>>()?;
                    WindowPattern::new(window, ordered)?
                }
                None => {
                    let nd = alphabet.size().ok_or_else(|| {
                        CliError::Argument("random patterns need a finite alphabet; pass --values".into())
                    })?;
                    let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                    let idx: Vec<usize> = (0..window.len()).map(|_| rng.gen_range(0..nd)).collect();
                    WindowPattern::from_indices(window, &alphabet, &idx)?
                }
            };
            let image = l.ca.apply_window(&pattern)?;
            let params = json!({ "cells": cells, "values": values, "seed": values.is_none().then_some(*seed) });
            let mut r = Report::new("apply", vec![l.input], params);
            r.result = json!({
                "window": elements(pattern.window()),
                "values": point_values(&alphabet, pattern.values()),
                "image_window": elements(image.window()),
                "image_values": point_values(&alphabet, image.values()),
            });
            Ok(r)
        }
        Command::Fix { rule, subgroup } => {
            let l = load(rule)?;
            let h = parse_subgroup(subgroup, l.ca.group())?;
            let cosets = coset_space(&h, l.ca.group())?;
            let tilde = build_tilde(&l.ca, &cosets)?;
            let mut r = Report::new("fix", vec![l.input], json!({ "subgroup": subgroup }));
            let mut result = coset_json(&cosets);
            result["dependencies"] = json!(tilde.dependencies());
            if l.ca.alphabet().is_finite() {
                let images = tilde.materialize()?;
                let mut sorted = images.clone();
                sorted.sort_unstable();
                sorted.dedup();
                let bijective = sorted.len() == images.len();
                r.verdicts.push(Verdict::definite("fix-bijective", bijective, Provenance::Exhaustive));
                result["state_count"] = json!(images.len());
            }
            match conjugation_check(&l.ca, &cosets)? {
                ConjugationOutcome::Holds { checked, exhaustive } => {
                    let p = if exhaustive {
                        Provenance::Exhaustive
                    } else {
                        Provenance::VerifiedOnSamples
                    };
                    r.verdicts.push(Verdict::definite("conjugation", true, p));
                    result["conjugation_checked"] = json!(checked);
                }
                ConjugationOutcome::Violated { witness } => {
                    r.verdicts.push(Verdict::definite("conjugation", false, Provenance::Exhaustive));
                    result["conjugation_violation"] = json!(point_values(l.ca.alphabet(), &witness));
                }
            }
            r.result = result;
            Ok(r)
        }
        Command::Scan { rule, search, window } => {
            let l = load(rule)?;
            let mut probe = ProbeOptions::default();
            if let Some(w) = window {
                probe.stages = *w;
            }
            let opts = ScanOptions {
                schedule: schedule(search)?,
                probe,
                cross_check_1d: true,
            };
            let inj = injectivity_scan(&l.ca, &opts)?;
            let surj = surjectivity_scan(&l.ca, &opts)?;
            let mut r = Report::new("scan", vec![l.input], json!({ "schedule": opts.schedule, "probe": probe }));
            r.verdicts.push(match inj.verdict() {
                Some(v) => Verdict::definite("injective", v, Provenance::Exhaustive),
                None => Verdict::inconclusive("injective"),
            });
            r.verdicts.push(match surj.verdict() {
                Some(v) => Verdict::definite("surjective", v, Provenance::Exhaustive),
                None => Verdict::inconclusive("surjective"),
            });
            let a = l.ca.alphabet();
            let collision = inj.collision.as_ref().map(|c| {
                let cosets = coset_space(&c.subgroup, l.ca.group()).expect("scanned subgroup");
                json!({
                    "cosets": coset_json(&cosets),
                    "first": points(a, &c.first),
                    "second": points(a, &c.second),
                })
            });
            let uncovered: Vec<Value> = surj
                .uncovered
                .iter()
                .map(|u| json!({ "subgroup": u.subgroup, "target": points(a, &u.target), "probe": u.probe }))
                .collect();
            r.result = json!({
                "collision": collision,
                "uncovered": uncovered,
                "fix_covered": surj.fix_covered,
                "exact_injective": inj.exact_injective,
                "exact_surjective": surj.exact_surjective,
                "injectivity_scans": inj.scans,
                "surjectivity_scans": surj.scans,
            });
            Ok(r)
        }
        Command::Invert { rule, search, degree_cap } => {
            let l = load(rule)?;
            let mut opts = SynthesisOptions {
                schedule: schedule(search)?,
                ..SynthesisOptions::default()
            };
            if let Some(d) = degree_cap {
                opts.degree_cap = *d;
            }
            let s = synthesize_inverse(&l.ca, &opts)?;
            let mut r = Report::new("invert", vec![l.input], json!({ "options": opts }));
            let a = l.ca.alphabet();
            let outcome = match &s.outcome {
                SynthesisOutcome::Found {
                    inverse,
                    subgroup,
                    candidate_memory,
                    certification,
                } => {
                    r.verdicts.push(Verdict::definite("invertible", true, Provenance::Exhaustive));
                    json!({
                        "inverse": describe(inverse),
                        "subgroup": subgroup,
                        "candidate_memory": elements(candidate_memory),
                        "certification": certification,
                    })
                }
                SynthesisOutcome::NotInjective(c) => {
                    r.verdicts.push(Verdict::definite("invertible", false, Provenance::Exhaustive));
                    let cosets = coset_space(&c.subgroup, l.ca.group())?;
                    json!({
                        "collision": {
                            "cosets": coset_json(&cosets),
                            "first": points(a, &c.first),
                            "second": points(a, &c.second),
                        }
                    })
                }
                SynthesisOutcome::Exhausted => {
                    r.verdicts.push(Verdict::inconclusive("invertible"));
                    json!({ "exhausted": true })
                }
            };
            r.result = json!({ "outcome": outcome, "transcript": s.transcript });
            Ok(r)
        }
        Command::Certify { rule, candidate } => {
            let (a, b) = (load(rule)?, load(candidate)?);
            let c = certify_inverse(&a.ca, &b.ca)?;
            let mut r = Report::new("certify", vec![a.input, b.input], json!({}));
            r.verdicts.push(Verdict::definite("inverse", c.holds(), Provenance::Exhaustive));
            r.result = json!({ "certification": c });
            Ok(r)
        }
        Command::Probe {
            rule,
            subgroup,
            target,
            window,
        } => {
            let l = load(rule)?;
            let a = l.ca.alphabet().clone();
            let h = parse_subgroup(subgroup, l.ca.group())?;
            let cosets = coset_space(&h, l.ca.group())?;
            let values = target.split(';').map(|t| a.parse_point(t)).collect::<algca::Result<Vec<_>>>()?;
            let d = rho(&cosets, values)?;
            let mut opts = ProbeOptions::default();
            if let Some(w) = window {
                opts.stages = *w;
            }
            let outcome = closed_image_probe(&l.ca, &d, &opts)?;
            let mut r = Report::new(
                "probe",
                vec![l.input],
                json!({ "subgroup": subgroup, "target": target, "options": opts }),
            );
            r.result = match outcome {
                ProbeOutcome::PreimageFound { preimage, fiber_sizes } => {
                    r.verdicts.push(Verdict::definite("in-image", true, Provenance::Exhaustive));
                    json!({
                        "target_cosets": coset_json(&cosets),
                        "preimage": {
                            "cosets": coset_json(preimage.cosets()),
                            "values": point_values(&a, preimage.values()),
                        },
                        "fiber_sizes": fiber_sizes,
                    })
                }
                ProbeOutcome::EmptyAtStage {
                    stage,
                    window,
                    fiber_sizes,
                } => {
                    r.verdicts.push(Verdict::definite("in-image", false, Provenance::Exhaustive));
                    json!({
                        "target_cosets": coset_json(&cosets),
                        "empty_stage": stage,
                        "window": elements(&window),
                        "fiber_sizes": fiber_sizes,
                    })
                }
                ProbeOutcome::Undetermined { fiber_sizes } => {
                    r.verdicts.push(Verdict::inconclusive("in-image"));
                    json!({ "target_cosets": coset_json(&cosets), "fiber_sizes": fiber_sizes })
                }
            };
            Ok(r)
        }
        Command::Decide1d { rule } => {
            let l = load(rule)?;
            require_1d(&l.ca)?;
            let d = decide_1d(&l.ca)?;
            let a = l.ca.alphabet();
            let mut r = Report::new("decide-1d", vec![l.input], json!({}));
            r.verdicts.push(Verdict::definite("injective", d.is_injective(), Provenance::Exhaustive));
            r.verdicts.push(Verdict::definite("surjective", d.is_surjective(), Provenance::Exhaustive));
            let collision = match &d.injective {
                InjectivityVerdict::Injective => Value::Null,
                InjectivityVerdict::NotInjective { collision } => json!({
                    "period": collision.period,
                    "first": points(a, &collision.first),
                    "second": points(a, &collision.second),
                }),
            };
            let orphan = match &d.surjective {
                SurjectivityVerdict::Surjective => Value::Null,
                SurjectivityVerdict::NotSurjective { orphan } => json!(points(a, &orphan.word)),
            };
            r.result = json!({
                "minimal_memory": elements(&d.minimal_memory),
                "collision": collision,
                "orphan": orphan,
            });
            Ok(r)
        }
        Command::Examples {
            which,
            window,
            degree_cap,
        } => match which {
            ExampleName::Quadratic => {
                let w = window.unwrap_or(10);
                let q = quadratic_example_probe(w.min(4), w)?;
                let mut r = Report::new("examples", Vec::new(), json!({ "example": "quadratic", "window": w }));
                let all = q.windows_verified.len() == w;
                r.verdicts.push(Verdict::definite("windows-have-preimages", all, Provenance::Exhaustive));
                r.verdicts.push(Verdict::definite(
                    "constant-preimage-exists",
                    !q.constant_preimages.is_empty(),
                    Provenance::Exhaustive,
                ));
                r.verdicts.push(Verdict::definite(
                    "finite-variant-surjective",
                    q.finite_variant_surjective,
                    Provenance::Exhaustive,
                ));
                r.result = serde_json::to_value(&q).expect("serializable");
                Ok(r)
            }
            ExampleName::Kt => {
                let dmax = degree_cap.unwrap_or(10);
                let k = kt_example_probe(dmax)?;
                let mut r = Report::new("examples", Vec::new(), json!({ "example": "kt", "degree_cap": dmax }));
                let any_consistent = k.levels.iter().any(|l| l.consistent);
                let kernels_zero = k.levels.iter().all(|l| l.kernel_dimension == 0);
                r.verdicts.push(Verdict::definite("bounded-solve-consistent", any_consistent, Provenance::Exhaustive));
                r.verdicts.push(Verdict::definite("kernel-zero", kernels_zero, Provenance::Exhaustive));
                r.result = serde_json::to_value(&k).expect("serializable");
                Ok(r)
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedules() {
        assert_eq!(
            parse_schedule("diag:3,index:12").unwrap(),
            Schedule {
                diagonal_max: 3,
                index_bound: 12
            }
        );
        assert!(parse_schedule("depth:3").is_err());
        let s = schedule(&SearchArgs {
            index_bound: Some(4),
            schedule: None,
        })
        .unwrap();
        assert_eq!((s.diagonal_max, s.index_bound), (4, 4));
    }

    #[test]
    fn subgroups() {
        let z = GroupSpec::integers();
        assert_eq!(parse_subgroup("3", &z).unwrap(), FiniteIndexSubgroup::diagonal(1, 3));
        let z2 = GroupSpec::free_abelian(2).unwrap();
        assert_eq!(parse_subgroup("2", &z2).unwrap(), FiniteIndexSubgroup::diagonal(2, 2));
        assert_eq!(parse_subgroup("2,0;0,1", &z2).unwrap().index(&z2), 2);
        assert!(parse_subgroup("2,x", &z2).is_err());
    }
}
