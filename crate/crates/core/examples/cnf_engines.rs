//! Runs plain DPLL and CDCL on the same random 3-CNF formulas and compares
//! verdicts and search effort.
//!
//! `cargo run --release --example cnf_engines -- 100 4.26 50`

use std::time::Instant;

use fragsat::phasemap::random_kcnf;
use fragsat::solver::{cnf_sat_with, Branching, CnfOptions, CnfResult, Engine};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(80, |a| a.parse().expect("variables"));
    let ratio: f64 = args.get(1).map_or(4.26, |a| a.parse().expect("ratio"));
    let count: usize = args.get(2).map_or(30, |a| a.parse().expect("count"));
    let engines = [
        ("dpll/shortest", CnfOptions { branching: Branching::ShortestClauses, ..CnfOptions::default() }),
        ("cdcl", CnfOptions { engine: Engine::Cdcl, ..CnfOptions::default() }),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let formulas: Vec<_> =
        (0..count).map(|_| random_kcnf(3, n, (ratio * n as f64).round() as usize, &mut rng)).collect();
    let mut verdicts = Vec::new();
    for (name, options) in &engines {
        let start = Instant::now();
        let (mut decisions, mut sat) = (0, 0);
        let mut v = Vec::new();
        for f in &formulas {
            let (result, stats) = cnf_sat_with(f, &[], options);
            if let CnfResult::Sat(a) = &result {
                assert!(f.evaluate(a));
                sat += 1;
            }
            decisions += stats.decisions;
            v.push(matches!(result, CnfResult::Sat(_)));
        }
        println!("{name:<14} {sat}/{count} sat, {decisions} decisions, {:.1} ms", start.elapsed().as_secs_f64() * 1e3);
        verdicts.push(v);
    }
    assert_eq!(verdicts[0], verdicts[1], "engines disagree");
}
