//! Exact injectivity and surjectivity for `G = Z` with a finite alphabet.
//!
//! After minimizing and translating the memory into `{0, …, r}`, the local
//! rule `f: A^{r+1} -> A` labels the de Bruijn graph on `A^r`. Shifting
//! the memory composes with a shift and changes neither property.
//!
//! * Injectivity: in the pair graph on `A^r × A^r` (edge labelled `(a, b)`
//!   when `f(ua) = f(vb)`), `τ` fails to be injective iff some cycle uses
//!   an edge with `a ≠ b`. The diagonal is a copy of the full de Bruijn
//!   graph and hence strongly connected, so any bi-infinite collision
//!   closes up into such a cycle; the cycle is a collision of periodic
//!   configurations.
//! * Surjectivity: the subset construction started from all of `A^r`
//!   reads output words; reaching the empty set spells an orphan word.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::alphabet::tuple_count;
use crate::error::{Error, Result};
use crate::groups::{product_set, FiniteSubset, GroupSpec};

use super::{minimal_memory, CellularAutomaton, WindowPattern};

/// Cap on pair-graph vertices `|A|^{2r}`.
pub const PAIR_GRAPH_CAP: u128 = 1 << 22;
/// Cap on subsets visited by the subset construction.
pub const SUBSET_CAP: usize = 1 << 20;
/// Cap on window patterns enumerated to re-verify an orphan.
pub const ORPHAN_CHECK_CAP: u128 = 1 << 24;

/// Two distinct `period`-periodic configurations with equal images;
/// `first[i]` is the point index at every `n ≡ i (mod period)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeriodicCollision {
    pub period: usize,
    pub first: Vec<usize>,
    pub second: Vec<usize>,
}

/// A word on positions `0..word.len()` outside the image language.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrphanWord {
    pub word: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum InjectivityVerdict {
    Injective,
    NotInjective { collision: PeriodicCollision },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum SurjectivityVerdict {
    Surjective,
    NotSurjective { orphan: OrphanWord },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Decision1d {
    pub injective: InjectivityVerdict,
    pub surjective: SurjectivityVerdict,
    /// Memory after minimization (before translation).
    pub minimal_memory: FiniteSubset,
}

impl Decision1d {
    pub fn is_injective(&self) -> bool {
        matches!(self.injective, InjectivityVerdict::Injective)
    }

    pub fn is_surjective(&self) -> bool {
        matches!(self.surjective, SurjectivityVerdict::Surjective)
    }
}

/// Decides injectivity and surjectivity of a 1-D automaton over a finite
/// alphabet. Witnesses are re-verified against the original rule.
pub fn decide_1d(ca: &CellularAutomaton) -> Result<Decision1d> {
    if ca.group() != &GroupSpec::integers() {
        return Err(Error::Precondition("decide_1d needs G = Z".into()));
    }
    let nd = ca.alphabet().size().ok_or(Error::InfiniteAlphabet)?;
    if nd == 0 {
        return Err(Error::EmptyAlphabet);
    }
    let min = minimal_memory(ca)?;
    let offsets: Vec<i64> = min.memory().iter().map(|h| h.as_vector().unwrap()[0]).collect();
    let lo = offsets.first().copied().unwrap_or(0);
    let r = offsets.last().map_or(0, |hi| (hi - lo) as usize);
    let local = LocalRule::build(&min, nd, r, &offsets, lo)?;

    let injective = match local.find_collision()? {
        None => InjectivityVerdict::Injective,
        Some(c) => {
            verify_collision(ca, nd, &c)?;
            InjectivityVerdict::NotInjective { collision: c }
        }
    };
    let surjective = match local.find_orphan()? {
        None => SurjectivityVerdict::Surjective,
        Some(o) => {
            verify_orphan(ca, &o)?;
            SurjectivityVerdict::NotSurjective { orphan: o }
        }
    };
    Ok(Decision1d {
        injective,
        surjective,
        minimal_memory: min.memory().clone(),
    })
}

/// `f: A^{r+1} -> A` on contiguous windows, little-endian codes.
struct LocalRule {
    nd: usize,
    r: usize,
    /// `|A|^r`, the number of de Bruijn vertices.
    nv: usize,
    f: Vec<u32>,
}

impl LocalRule {
    fn build(min: &CellularAutomaton, nd: usize, r: usize, offsets: &[i64], lo: i64) -> Result<Self> {
        let count = tuple_count(nd, r + 1, crate::alphabet::TABLE_CAP)?;
        let nv = count / nd;
        let table = min.rule().lookup_table()?;
        let mut w = vec![0usize; r + 1];
        let f = (0..count)
            .map(|code| {
                crate::alphabet::decode_tuple(code, nd, &mut w);
                let c = offsets
                    .iter()
                    .rev()
                    .fold(0usize, |acc, &o| acc * nd + w[(o - lo) as usize]);
                table[c]
            })
            .collect();
        Ok(LocalRule { nd, r, nv, f })
    }

    /// Vertex reached from word `u` after appending `a`.
    fn tail(&self, u: usize, a: usize) -> usize {
        if self.r == 0 {
            0
        } else {
            u / self.nd + a * (self.nv / self.nd)
        }
    }

    fn value(&self, u: usize, a: usize) -> u32 {
        self.f[u + a * self.nv]
    }

    /// Pair-graph successors `(next, a, b)` of the vertex pair `(u, v)`.
    fn pair_edges(&self, u: usize, v: usize, out: &mut Vec<(usize, usize, usize)>) {
        out.clear();
        for a in 0..self.nd {
            let fa = self.value(u, a);
            for b in 0..self.nd {
                if self.value(v, b) == fa {
                    out.push((self.tail(u, a) * self.nv + self.tail(v, b), a, b));
                }
            }
        }
    }

    fn find_collision(&self) -> Result<Option<PeriodicCollision>> {
        let needed = (self.nv as u128) * (self.nv as u128);
        if needed > PAIR_GRAPH_CAP {
            return Err(Error::CapExceeded {
                needed,
                cap: PAIR_GRAPH_CAP,
            });
        }
        let n = needed as usize;
        let comp = self.pair_components(n);
        // first few cycle-closing edges with a ≠ b, shortest cycle wins
        let mut best: Option<Vec<(usize, usize, usize)>> = None;
        let mut tried = 0;
        let mut edges = Vec::new();
        'outer: for x in 0..n {
            self.pair_edges(x / self.nv, x % self.nv, &mut edges);
            for &(y, a, b) in &edges {
                if a == b || comp[x] != comp[y] {
                    continue;
                }
                let path = self.shortest_path(y, x, &comp);
                let mut cycle = vec![(y, a, b)];
                cycle.extend(path);
                if best.as_ref().is_none_or(|c| cycle.len() < c.len()) {
                    best = Some(cycle);
                }
                tried += 1;
                if tried >= 64 {
                    break 'outer;
                }
            }
        }
        Ok(best.map(|cycle| {
            // edge k writes position k; the images agree window by window
            let first = cycle.iter().map(|e| e.1).collect::<Vec<_>>();
            let second = cycle.iter().map(|e| e.2).collect::<Vec<_>>();
            PeriodicCollision {
                period: cycle.len(),
                first,
                second,
            }
        }))
    }

    /// Edge list of a shortest path `from -> to` inside one component.
    fn shortest_path(&self, from: usize, to: usize, comp: &[usize]) -> Vec<(usize, usize, usize)> {
        let mut parent: HashMap<usize, (usize, usize, usize)> = HashMap::new();
        let mut queue = VecDeque::from([from]);
        let mut edges = Vec::new();
        let mut seen = std::collections::HashSet::from([from]);
        while let Some(x) = queue.pop_front() {
            if x == to {
                break;
            }
            self.pair_edges(x / self.nv, x % self.nv, &mut edges);
            for &(y, a, b) in &edges {
                if comp[y] == comp[from] && seen.insert(y) {
                    parent.insert(y, (x, a, b));
                    queue.push_back(y);
                }
            }
        }
        let mut path = Vec::new();
        let mut cur = to;
        while cur != from {
            let (p, a, b) = parent[&cur];
            path.push((cur, a, b));
            cur = p;
        }
        path.reverse();
        path
    }

    /// Strongly connected components (iterative Tarjan).
    fn pair_components(&self, n: usize) -> Vec<usize> {
        const UNSEEN: usize = usize::MAX;
        let mut index = vec![UNSEEN; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut comp = vec![UNSEEN; n];
        let mut stack = Vec::new();
        let mut counter = 0;
        let mut ncomp = 0;
        let succ = |x: usize| {
            let mut e = Vec::new();
            self.pair_edges(x / self.nv, x % self.nv, &mut e);
            e.into_iter().map(|t| t.0).collect::<Vec<_>>()
        };
        for root in 0..n {
            if index[root] != UNSEEN {
                continue;
            }
            let mut call: Vec<(usize, Vec<usize>, usize)> = vec![(root, succ(root), 0)];
            index[root] = counter;
            low[root] = counter;
            counter += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some((v, succs, i)) = call.last_mut() {
                let v = *v;
                if *i < succs.len() {
                    let w = succs[*i];
                    *i += 1;
                    if index[w] == UNSEEN {
                        index[w] = counter;
                        low[w] = counter;
                        counter += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, succ(w), 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some((parent, _, _)) = call.last() {
                        low[*parent] = low[*parent].min(low[v]);
                    }
                    if low[v] == index[v] {
                        loop {
                            let w = stack.pop().unwrap();
                            on_stack[w] = false;
                            comp[w] = ncomp;
                            if w == v {
                                break;
                            }
                        }
                        ncomp += 1;
                    }
                }
            }
        }
        comp
    }

    fn find_orphan(&self) -> Result<Option<OrphanWord>> {
        let words = self.nv.div_ceil(64);
        let mut full = vec![0u64; words];
        for u in 0..self.nv {
            full[u / 64] |= 1 << (u % 64);
        }
        let mut ids: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut states = vec![full.clone()];
        let mut parent: Vec<Option<(usize, u32)>> = vec![None];
        ids.insert(full, 0);
        let mut queue = VecDeque::from([0usize]);
        let symbols = self.nd as u32;
        while let Some(s) = queue.pop_front() {
            for c in 0..symbols {
                let mut next = vec![0u64; words];
                let mut any = false;
                for u in 0..self.nv {
                    if states[s][u / 64] >> (u % 64) & 1 == 0 {
                        continue;
                    }
                    for a in 0..self.nd {
                        if self.value(u, a) == c {
                            let t = self.tail(u, a);
                            next[t / 64] |= 1 << (t % 64);
                            any = true;
                        }
                    }
                }
                if !any {
                    let mut word = vec![c as usize];
                    let mut cur = s;
                    while let Some((p, sym)) = parent[cur] {
                        word.push(sym as usize);
                        cur = p;
                    }
                    word.reverse();
                    return Ok(Some(OrphanWord { word }));
                }
                if !ids.contains_key(&next) {
                    if states.len() >= SUBSET_CAP {
                        return Err(Error::CapExceeded {
                            needed: states.len() as u128 + 1,
                            cap: SUBSET_CAP as u128,
                        });
                    }
                    ids.insert(next.clone(), states.len());
                    parent.push(Some((s, c)));
                    queue.push_back(states.len());
                    states.push(next);
                }
            }
        }
        Ok(None)
    }
}

/// Evaluates both periodic configurations with the original rule.
fn verify_collision(ca: &CellularAutomaton, nd: usize, c: &PeriodicCollision) -> Result<()> {
    let l = c.period as i64;
    let image = |x: &[usize]| -> Result<Vec<usize>> {
        (0..l)
            .map(|n| {
                let args: Vec<usize> = ca
                    .memory()
                    .iter()
                    .map(|h| x[(n + h.as_vector().unwrap()[0]).rem_euclid(l) as usize])
                    .collect();
                ca.rule().apply_indices(&args)
            })
            .collect()
    };
    debug_assert!(c.first.iter().chain(&c.second).all(|&a| a < nd));
    if c.first == c.second || image(&c.first)? != image(&c.second)? {
        return Err(Error::Precondition("collision witness failed re-verification".into()));
    }
    Ok(())
}

/// Checks that no pattern on `[0, k) · M` maps onto the orphan word.
fn verify_orphan(ca: &CellularAutomaton, o: &OrphanWord) -> Result<()> {
    let k = o.word.len() as i64;
    let target = FiniteSubset::interval(0, k - 1);
    let omega = product_set(&target, ca.memory(), ca.group())?;
    let nd = ca.alphabet().size().unwrap();
    let count = (nd as u128).checked_pow(omega.len() as u32).unwrap_or(u128::MAX);
    if count > ORPHAN_CHECK_CAP {
        return Err(Error::CapExceeded {
            needed: count,
            cap: ORPHAN_CHECK_CAP,
        });
    }
    let map = ca.window_map(&omega)?;
    debug_assert!(target.is_subset_of(map.target()));
    let positions: Vec<usize> = target.iter().map(|g| map.target().position(g).unwrap()).collect();
    let mut u = vec![0usize; omega.len()];
    let mut out = Vec::new();
    for code in 0..count as usize {
        crate::alphabet::decode_tuple(code, nd, &mut u);
        map.apply_indices(&u, &mut out)?;
        if positions.iter().zip(&o.word).all(|(&p, &w)| out[p] == w) {
            let pattern = WindowPattern::from_indices(omega.clone(), ca.alphabet(), &u)?;
            return Err(Error::Precondition(format!(
                "orphan witness has a preimage {:?}",
                pattern.values()
            )));
        }
    }
    Ok(())
}
