//! Compares the native verdict with bounded grounding (domain sizes 1..=d)
//! on a handful of sentence sets.
//!
//! `cargo run --release --example ground_oracle -- 4`

use fragsat::grammar::{parse, FragmentTag, Vocabulary};
use fragsat::logic::{translate, Signature};
use fragsat::solver::{ground_check, model_check, solve, GroundResult, SolveOptions};

fn main() {
    let d: usize = std::env::args().nth(1).map_or(3, |a| a.parse().expect("depth"));
    let vocab = Vocabulary::default_english();
    let sets: [(FragmentTag, &[&str]); 4] = [
        (FragmentTag::S, &["Every artist is a baker", "Some artist is not a baker"]),
        (FragmentTag::W, &["Every artist who is a baker is a chemist", "Some artist is a baker"]),
        (
            FragmentTag::V,
            &["Every artist admires some baker", "No baker admires any artist", "Some baker is an artist"],
        ),
        (FragmentTag::A, &["Some artist admires every baker", "Every baker is an artist", "Some baker is a baker"]),
    ];
    for (fragment, texts) in sets {
        let formulas: Vec<_> =
            texts.iter().map(|t| translate(&parse(t, fragment, &vocab).expect("parse"), &vocab).unwrap()).collect();
        let native = solve(fragment, &formulas, &SolveOptions::default()).expect("solve");
        let ground = ground_check(&formulas, &Signature::from_formulas(&formulas), d).expect("ground");
        let shown = match &ground {
            GroundResult::Model(m) => {
                assert!(model_check(m, &formulas).unwrap());
                format!("model of size {}", m.size)
            }
            GroundResult::NoModelUpTo(d) => format!("no model up to {d}"),
        };
        println!("{fragment} {:<6} grounding: {shown}", if native.is_sat() { "sat" } else { "unsat" });
        for t in texts {
            println!("    {t}");
        }
    }
}
