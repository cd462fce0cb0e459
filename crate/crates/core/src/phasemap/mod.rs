//! Monte Carlo estimates of the probability of satisfiability, phase-change
//! regions, instance statistics and the random k-SAT baseline.

mod grid;
mod ksat;
mod stats;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use grid::{
    extract_region, load_grid, load_region, map_region, write_grid, write_region, Axis, GridSpec, PhaseCell, PhaseGrid,
    PhaseRegion,
};
pub use ksat::{crossing, ksat_psat, random_kcnf, KsatPoint};
pub use stats::{instance_stats, InstanceStats};

use crate::grammar::{sample_sentence_set, AbstractSentence, FragmentTag, GrammarError, SamplingOptions, Vocabulary};
use crate::logic::{translate, Formula, LogicError};
use crate::solver::{solve, SolveOptions, SolverError, Verdict};

#[derive(Debug, Error)]
pub enum PhaseError {
    #[error("at least one sample is required")]
    NoSamples,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("region bounds must satisfy lo < hi (got {lo}, {hi})")]
    InvalidBounds { lo: f64, hi: f64 },
    #[error("{0}")]
    Budget(String),
    #[error("malformed grid file: {0}")]
    Format(String),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Wilson score interval at 95% confidence.
pub fn wilson(successes: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let n = n as f64;
    let p = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Seed for a task at `path` under `master`, independent of scheduling.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    for p in path {
        h.update(p.to_le_bytes());
    }
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest has 32 bytes"))
}

/// Everything needed to draw and label random instances.
#[derive(Clone, Debug)]
pub struct Sampler {
    pub vocab: Vocabulary,
    pub sampling: SamplingOptions,
    pub solve: SolveOptions,
    /// Attempts per sample before a timed-out draw counts as lost.
    pub max_attempts: usize,
}

impl Default for Sampler {
    fn default() -> Self {
        Sampler {
            vocab: Vocabulary::default_english(),
            sampling: SamplingOptions::default(),
            // No wall-clock budget: labels must not depend on machine speed.
            solve: SolveOptions { wall_budget: None, ..SolveOptions::default() },
            max_attempts: 5,
        }
    }
}

/// One drawn and labeled instance.
#[derive(Clone, Debug)]
pub struct Draw {
    pub sentences: Vec<AbstractSentence>,
    pub formulas: Vec<Formula>,
    pub verdict: Verdict,
}

impl Sampler {
    /// Samples a vocabulary subset and `m` distinct sentences, then solves.
    pub fn draw<R: Rng + ?Sized>(
        &self,
        fragment: FragmentTag,
        m: usize,
        n1: usize,
        n2: usize,
        rng: &mut R,
    ) -> Result<Draw, PhaseError> {
        let subset = self.vocab.sample_subset(n1, n2, rng)?;
        let sentences = sample_sentence_set(fragment, &subset, m, self.sampling, rng)?;
        let formulas = sentences.iter().map(|s| translate(s, &self.vocab)).collect::<Result<Vec<_>, _>>()?;
        let verdict = solve(fragment, &formulas, &self.solve)?;
        Ok(Draw { sentences, formulas, verdict })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub samples: usize,
    pub sat: usize,
    pub timeouts: usize,
    pub phat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// Some sample timed out on every attempt and was dropped.
    pub unreliable: bool,
}

/// Pooled estimate over parameter combinations `(m, n1, n2)`; each sample
/// picks one combination uniformly. `stream` separates independent runs
/// sharing a master seed.
pub(crate) fn estimate_pooled(
    fragment: FragmentTag,
    combos: &[(usize, usize, usize)],
    samples: usize,
    seed: u64,
    stream: u64,
    sampler: &Sampler,
) -> Result<Estimate, PhaseError> {
    if samples == 0 {
        return Err(PhaseError::NoSamples);
    }
    if combos.is_empty() {
        return Err(PhaseError::InvalidParameter("no feasible (m, n1, n2) combination".into()));
    }
    let results: Vec<(Option<bool>, usize)> = (0..samples)
        .into_par_iter()
        .map(|si| {
            let mut timeouts = 0;
            for attempt in 0..sampler.max_attempts.max(1) {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[stream, si as u64, attempt as u64]));
                let (m, n1, n2) = combos[rng.random_range(0..combos.len())];
                let draw = sampler.draw(fragment, m, n1, n2, &mut rng)?;
                match draw.verdict.label() {
                    Some(label) => return Ok((Some(label), timeouts)),
                    None => timeouts += 1,
                }
            }
            Ok((None, timeouts))
        })
        .collect::<Result<_, PhaseError>>()?;
    let labeled = results.iter().filter(|r| r.0.is_some()).count();
    let sat = results.iter().filter(|r| r.0 == Some(true)).count();
    let timeouts = results.iter().map(|r| r.1).sum();
    let (ci_lo, ci_hi) = wilson(sat, labeled);
    Ok(Estimate {
        samples: labeled,
        sat,
        timeouts,
        phat: if labeled == 0 { f64::NAN } else { sat as f64 / labeled as f64 },
        ci_lo,
        ci_hi,
        unreliable: labeled < samples,
    })
}

/// Estimates P(sat) for instances of `m` sentences over `n1` nouns and
/// `n2` verbs.
pub fn estimate_psat(
    fragment: FragmentTag,
    m: usize,
    n1: usize,
    n2: usize,
    samples: usize,
    seed: u64,
    sampler: &Sampler,
) -> Result<Estimate, PhaseError> {
    if m == 0 || n1 == 0 {
        return Err(PhaseError::InvalidParameter("m and n1 must be positive".into()));
    }
    if fragment.has_verbs() && n2 == 0 {
        return Err(PhaseError::InvalidParameter(format!("fragment {fragment} needs n2 ≥ 1")));
    }
    estimate_pooled(fragment, &[(m, n1, n2)], samples, seed, 0, sampler)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_interval_contains_estimate() {
        let (lo, hi) = wilson(50, 100);
        assert!(lo < 0.5 && hi > 0.5);
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
        assert_eq!(wilson(0, 10).0, 0.0);
        assert!((wilson(10, 10).1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn seeds_differ_by_path() {
        assert_ne!(derive_seed(1, &[0, 1]), derive_seed(1, &[1, 0]));
        assert_eq!(derive_seed(9, &[3]), derive_seed(9, &[3]));
    }

    #[test]
    fn estimates_are_reproducible() {
        let s = Sampler::default();
        let a = estimate_psat(FragmentTag::S, 10, 6, 0, 40, 3, &s).unwrap();
        let b = estimate_psat(FragmentTag::S, 10, 6, 0, 40, 3, &s).unwrap();
        assert_eq!(a, b);
        assert!(a.ci_lo <= a.phat && a.phat <= a.ci_hi);
        assert!(matches!(estimate_psat(FragmentTag::S, 10, 6, 0, 0, 3, &s), Err(PhaseError::NoSamples)));
        assert!(estimate_psat(FragmentTag::V, 10, 6, 0, 5, 3, &s).is_err());
    }
}
