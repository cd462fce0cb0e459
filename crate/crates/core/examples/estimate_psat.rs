//! Monte Carlo estimate of P(sat) for one fragment at fixed (m, n1, n2).
//!
//! `cargo run --release --example estimate_psat -- A 24 4 4 200`

use std::time::Instant;

use fragsat::grammar::FragmentTag;
use fragsat::phasemap::{estimate_psat, Sampler};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let fragment: FragmentTag = args.first().map_or("S", String::as_str).parse().expect("fragment tag");
    let num = |i: usize, d: usize| args.get(i).map_or(d, |a| a.parse().expect("number"));
    let (m, n1, n2, samples) = (num(1, 12), num(2, 8), num(3, 0), num(4, 200));
    let start = Instant::now();
    let e = estimate_psat(fragment, m, n1, n2, samples, 7, &Sampler::default()).expect("valid parameters");
    println!(
        "{fragment} m={m} n1={n1} n2={n2}: p = {:.3} [{:.3}, {:.3}] over {} samples, {} timeouts",
        e.phat, e.ci_lo, e.ci_hi, e.samples, e.timeouts
    );
    eprintln!("{:.2}s", start.elapsed().as_secs_f64());
}
