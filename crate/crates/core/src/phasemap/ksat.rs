//! Random k-SAT baseline.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::solver::{cnf_sat_with, CnfFormula, CnfOptions, CnfResult};

use super::{derive_seed, wilson, PhaseError};

/// Uniform random k-CNF: `m` clauses of `k` distinct variables with
/// fair-coin signs.
pub fn random_kcnf<R: Rng + ?Sized>(k: usize, n: usize, m: usize, rng: &mut R) -> CnfFormula {
    let mut f = CnfFormula::new(n);
    for _ in 0..m {
        let clause = index::sample(rng, n, k)
            .into_iter()
            .map(|v| {
                let lit = v as i32 + 1;
                if rng.random_bool(0.5) {
                    lit
                } else {
                    -lit
                }
            })
            .collect();
        f.add_clause(clause);
    }
    f
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsatPoint {
    pub ratio: f64,
    pub m: usize,
    pub samples: usize,
    pub sat: usize,
    pub phat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

/// Estimates P(sat) of random k-CNF over `n` variables at each clause ratio.
pub fn ksat_psat(
    k: usize,
    n: usize,
    ratios: &[f64],
    samples: usize,
    seed: u64,
    options: &CnfOptions,
) -> Result<Vec<KsatPoint>, PhaseError> {
    if k < 2 || k > n {
        return Err(PhaseError::InvalidParameter(format!("k = {k} needs 2 ≤ k ≤ n = {n}")));
    }
    if samples == 0 {
        return Err(PhaseError::NoSamples);
    }
    ratios
        .iter()
        .enumerate()
        .map(|(ri, &ratio)| {
            let m = (ratio * n as f64).round() as usize;
            let outcomes: Vec<Option<bool>> = (0..samples)
                .into_par_iter()
                .map(|si| {
                    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[ri as u64, si as u64]));
                    let f = random_kcnf(k, n, m, &mut rng);
                    match cnf_sat_with(&f, &[], options).0 {
                        CnfResult::Sat(_) => Some(true),
                        CnfResult::Unsat => Some(false),
                        CnfResult::Unknown => None,
                    }
                })
                .collect();
            if outcomes.iter().any(Option::is_none) {
                return Err(PhaseError::Budget(format!(
                    "k-SAT instance at ratio {ratio} exceeded the decision budget"
                )));
            }
            let sat = outcomes.iter().filter(|o| **o == Some(true)).count();
            let (ci_lo, ci_hi) = wilson(sat, samples);
            Ok(KsatPoint { ratio, m, samples, sat, phat: sat as f64 / samples as f64, ci_lo, ci_hi })
        })
        .collect()
}

/// Ratio where the curve first crosses `level`, by linear interpolation
/// between the bracketing points.
pub fn crossing(curve: &[KsatPoint], level: f64) -> Option<f64> {
    curve.windows(2).find_map(|w| {
        let (a, b) = (&w[0], &w[1]);
        if a.phat == level {
            return Some(a.ratio);
        }
        if (a.phat - level) * (b.phat - level) < 0.0 || b.phat == level {
            let t = (a.phat - level) / (a.phat - b.phat);
            Some(a.ratio + t * (b.ratio - a.ratio))
        } else {
            None
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clauses_have_distinct_variables() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_kcnf(3, 5, 200, &mut rng);
        assert_eq!(f.clauses.len(), 200);
        for c in &f.clauses {
            let mut v: Vec<i32> = c.iter().map(|l| l.abs()).collect();
            v.sort();
            v.dedup();
            assert_eq!(v.len(), 3);
        }
    }

    #[test]
    fn extremes_and_crossing() {
        let curve = ksat_psat(3, 40, &[1.0, 8.0], 50, 7, &CnfOptions::default()).unwrap();
        assert!(curve[0].phat >= 0.98, "{:?}", curve[0]);
        assert!(curve[1].phat <= 0.02, "{:?}", curve[1]);
        assert_eq!(crossing(&curve, 0.5).map(|r| r > 1.0 && r < 8.0), Some(true));
        assert!(ksat_psat(1, 10, &[1.0], 5, 0, &CnfOptions::default()).is_err());
    }
}
