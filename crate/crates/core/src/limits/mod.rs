//! Inverse sequences of finite sets, universal elements and threads,
//! window fibers `Z_Ω`, and the closed-image probe.

mod examples;
mod window;

use serde::Serialize;

use crate::error::{Error, Result};

pub use examples::{
    kt_example_probe, quadratic_example_probe, KtLevel, KtReport, QuadraticReport, KT_MAX_DEGREE,
    QUADRATIC_MAX_WINDOW,
};
pub use window::{
    closed_image_probe, verify_preimage, window_fibers, window_schedule, ProbeOptions, ProbeOutcome,
    WindowSystem,
};

/// Finite sets `Z_0, Z_1, …` (elements `0..size`) with transitions
/// `φ_n: Z_{n+1} -> Z_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiniteInverseSequence {
    sizes: Vec<usize>,
    maps: Vec<Vec<usize>>,
}

impl FiniteInverseSequence {
    pub fn new(sizes: Vec<usize>, maps: Vec<Vec<usize>>) -> Result<Self> {
        if sizes.is_empty() || maps.len() + 1 != sizes.len() {
            return Err(Error::Precondition("need one transition between consecutive levels".into()));
        }
        for (n, m) in maps.iter().enumerate() {
            if m.len() != sizes[n + 1] {
                return Err(Error::Arity {
                    expected: sizes[n + 1],
                    got: m.len(),
                });
            }
            if m.iter().any(|&z| z >= sizes[n]) {
                return Err(Error::Precondition(format!("transition {n} leaves level {n}")));
            }
        }
        Ok(FiniteInverseSequence { sizes, maps })
    }

    pub fn levels(&self) -> usize {
        self.sizes.len()
    }

    pub fn level_size(&self, n: usize) -> usize {
        self.sizes[n]
    }

    /// `φ_{n,n+1}`.
    pub fn transition(&self, n: usize) -> &[usize] {
        &self.maps[n]
    }

    /// `φ_{nm}(z)` for `z ∈ Z_m`, `n <= m`.
    pub fn project(&self, n: usize, m: usize, mut z: usize) -> usize {
        assert!(n <= m && m < self.levels());
        for k in (n..m).rev() {
            z = self.maps[k][z];
        }
        z
    }

    /// `φ_{nm}(Z_m)`, sorted.
    pub fn image(&self, n: usize, m: usize) -> Vec<usize> {
        let mut seen = vec![false; self.sizes[n]];
        for z in 0..self.sizes[m] {
            seen[self.project(n, m, z)] = true;
        }
        (0..self.sizes[n]).filter(|&z| seen[z]).collect()
    }

    /// Whether `thread[n] = φ_n(thread[n+1])` for every `n`.
    pub fn is_thread(&self, thread: &[usize]) -> bool {
        thread.len() <= self.levels()
            && thread.iter().enumerate().all(|(n, &z)| z < self.sizes[n])
            && thread.windows(2).enumerate().all(|(n, w)| self.maps[n][w[1]] == w[0])
    }
}

/// `Z'_n = ⋂_{n <= m <= n+depth} φ_{nm}(Z_m)`, sorted.
pub fn universal_elements(seq: &FiniteInverseSequence, n: usize, depth: usize) -> Result<Vec<usize>> {
    if n + depth >= seq.levels() {
        return Err(Error::Precondition(format!(
            "levels up to {} are not materialized",
            n + depth
        )));
    }
    let mut keep = vec![true; seq.level_size(n)];
    for m in n..=n + depth {
        let img = seq.image(n, m);
        let mut in_img = vec![false; keep.len()];
        for z in img {
            in_img[z] = true;
        }
        for (k, i) in keep.iter_mut().zip(in_img) {
            *k &= i;
        }
    }
    Ok((0..keep.len()).filter(|&z| keep[z]).collect())
}

/// The chain `Z'_n` for depth `0, 1, …` as far as the levels go.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UniversalChain {
    pub sets: Vec<Vec<usize>>,
    /// Smallest depth from which the chain is constant.
    pub stable_from: usize,
}

impl UniversalChain {
    pub fn is_decreasing(&self) -> bool {
        self.sets
            .windows(2)
            .all(|w| w[1].iter().all(|z| w[0].binary_search(z).is_ok()))
    }

    pub fn strict_decreases(&self) -> usize {
        self.sets.windows(2).filter(|w| w[1].len() < w[0].len()).count()
    }
}

pub fn universal_chain(seq: &FiniteInverseSequence, n: usize) -> Result<UniversalChain> {
    let sets = (0..seq.levels() - n)
        .map(|d| universal_elements(seq, n, d))
        .collect::<Result<Vec<_>>>()?;
    let last = sets.last().unwrap();
    let stable_from = sets.iter().position(|s| s == last).unwrap();
    Ok(UniversalChain { sets, stable_from })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum ThreadOutcome {
    /// `(z_0, …, z_N)` with `φ_n(z_{n+1}) = z_n`.
    Thread { thread: Vec<usize> },
    EmptyAtStage { stage: usize },
}

/// A compatible thread up to level `horizon`: pick an element of `Z_N`
/// and project it down. Every projection lies in the universal set
/// `φ_{nN}(Z_N)`, on which the transitions are onto.
pub fn limit_thread(seq: &FiniteInverseSequence, horizon: usize) -> Result<ThreadOutcome> {
    if horizon >= seq.levels() {
        return Err(Error::Precondition(format!("horizon {horizon} beyond the last level")));
    }
    if let Some(stage) = (0..=horizon).find(|&n| seq.level_size(n) == 0) {
        return Ok(ThreadOutcome::EmptyAtStage { stage });
    }
    let mut thread = vec![0usize; horizon + 1];
    for n in (0..horizon).rev() {
        thread[n] = seq.transition(n)[thread[n + 1]];
    }
    debug_assert!(seq.is_thread(&thread));
    Ok(ThreadOutcome::Thread { thread })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_transition_universal() {
        let seq = FiniteInverseSequence::new(vec![2, 2], vec![vec![0, 0]]).unwrap();
        assert_eq!(universal_elements(&seq, 0, 1).unwrap(), vec![0]);
        assert_eq!(universal_elements(&seq, 0, 0).unwrap(), vec![0, 1]);
    }

    #[test]
    fn bijective_transitions_keep_everything() {
        let seq = FiniteInverseSequence::new(vec![3, 3, 3], vec![vec![2, 0, 1], vec![1, 2, 0]]).unwrap();
        assert_eq!(universal_elements(&seq, 0, 2).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn threads() {
        let seq = FiniteInverseSequence::new(vec![1, 1, 1], vec![vec![0], vec![0]]).unwrap();
        assert_eq!(limit_thread(&seq, 2).unwrap(), ThreadOutcome::Thread { thread: vec![0, 0, 0] });
        let empty = FiniteInverseSequence::new(vec![2, 0, 0], vec![vec![], vec![]]).unwrap();
        assert_eq!(limit_thread(&empty, 2).unwrap(), ThreadOutcome::EmptyAtStage { stage: 1 });
    }

    #[test]
    fn malformed_sequences_rejected() {
        assert!(FiniteInverseSequence::new(vec![1, 2], vec![vec![0]]).is_err());
        assert!(FiniteInverseSequence::new(vec![1, 1], vec![vec![1]]).is_err());
    }

    fn sequences() -> impl Strategy<Value = FiniteInverseSequence> {
        prop::collection::vec(1usize..=6, 1..=11).prop_flat_map(|sizes| {
            let maps: Vec<_> = sizes
                .windows(2)
                .map(|w| prop::collection::vec(0..w[0], w[1]))
                .collect();
            (Just(sizes), maps)
                .prop_map(|(sizes, maps)| FiniteInverseSequence::new(sizes, maps).unwrap())
        })
    }

    proptest! {
        #[test]
        fn nonempty_levels_give_threads(seq in sequences()) {
            let horizon = seq.levels() - 1;
            match limit_thread(&seq, horizon).unwrap() {
                ThreadOutcome::Thread { thread } => prop_assert!(seq.is_thread(&thread)),
                other => prop_assert!(false, "{:?}", other),
            }
        }

        #[test]
        fn universal_chains_decrease_and_stabilize(seq in sequences()) {
            let chain = universal_chain(&seq, 0).unwrap();
            prop_assert!(chain.is_decreasing());
            prop_assert!(chain.strict_decreases() < seq.level_size(0));
            prop_assert!(chain.sets.iter().all(|s| !s.is_empty()));
        }
    }
}
