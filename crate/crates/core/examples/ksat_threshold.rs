//! Random 3-SAT baseline: P(sat) against the clause/variable ratio.
//!
//! `cargo run --release --example ksat_threshold -- [n] [samples] [lowest|shortest]`

use std::time::Instant;

use fragsat::phasemap::{crossing, ksat_psat};
use fragsat::solver::{Branching, CnfOptions};

fn main() {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(150, |a| a.parse().expect("n"));
    let samples: usize = args.next().map_or(100, |a| a.parse().expect("samples"));
    let branching = match args.next().as_deref() {
        Some("lowest") => Branching::Lowest,
        _ => Branching::ShortestClauses,
    };
    let options = CnfOptions { branching, ..CnfOptions::default() };
    let ratios: Vec<f64> = (0..=15).map(|i| 3.5 + 0.1 * i as f64).collect();
    let start = Instant::now();
    let curve = ksat_psat(3, n, &ratios, samples, 2024, &options).expect("valid parameters");
    for p in &curve {
        println!("{:.1}\t{:.3}\t[{:.3}, {:.3}]", p.ratio, p.phat, p.ci_lo, p.ci_hi);
    }
    match crossing(&curve, 0.5) {
        Some(x) => println!("P(sat) = 0.5 at m/n ≈ {x:.3}"),
        None => println!("no crossing inside the scanned ratios"),
    }
    eprintln!("{:.1}s", start.elapsed().as_secs_f64());
}
