//! Draws random instances, solves them and checks every certificate with
//! the independent model checker.
//!
//! `cargo run --release --example solve_random -- V 48 8 8 20`

use std::time::Instant;

use fragsat::grammar::FragmentTag;
use fragsat::phasemap::Sampler;
use fragsat::solver::model_check;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let fragment: FragmentTag = args.first().map_or("V", String::as_str).parse().expect("fragment tag");
    let num = |i: usize, d: usize| args.get(i).map_or(d, |a| a.parse().expect("number"));
    let (m, n1, n2, count) = (num(1, 24), num(2, 6), num(3, 4), num(4, 10));
    let sampler = Sampler::default();
    let mut rng = ChaCha8Rng::seed_from_u64(num(5, 1) as u64);
    let start = Instant::now();
    for i in 0..count {
        let t = Instant::now();
        let draw = sampler.draw(fragment, m, n1, n2, &mut rng).expect("valid parameters");
        let v = &draw.verdict;
        let checked = v.certificate().map(|c| model_check(&c.structure, &draw.formulas).expect("same signature"));
        println!(
            "#{i:<4} {:<7} nodes {:<9} {:>9.2} ms  model size {:<5} verified {}",
            match v.label() {
                Some(true) => "sat",
                Some(false) => "unsat",
                None => "timeout",
            },
            v.stats.nodes,
            t.elapsed().as_secs_f64() * 1e3,
            v.certificate().map_or(0, |c| c.size()),
            checked.map_or("-".to_string(), |b| b.to_string()),
        );
    }
    eprintln!("total {:.2}s", start.elapsed().as_secs_f64());
}
