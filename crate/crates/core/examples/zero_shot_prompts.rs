//! Builds the zero-shot evaluation layout for fragment S (per n = n1 in
//! 5..=10, half of each label) and prints prompts in both styles.
//!
//! `cargo run --release --example zero_shot_prompts -- 20`

use fragsat::datagen::{zero_shot_dataset, zero_shot_prompt, PromptStyle};
use fragsat::grammar::{FragmentTag, Vocabulary};
use fragsat::phasemap::{extract_region, map_region, Axis, GridSpec, Sampler};

fn main() {
    let per_n: usize = std::env::args().nth(1).map_or(10, |a| a.parse().expect("count"));
    let spec = GridSpec {
        fragment: FragmentTag::S,
        alpha: Axis::new(0.5, 3.0, 0.25),
        beta: None,
        n1: (5, 10),
        n2: (0, 0),
        samples: 100,
        seed: 5,
    };
    let region = extract_region(&map_region(&spec, &Sampler::default()).unwrap(), 0.35, 0.65).unwrap();
    let vocab = Vocabulary::default_english();
    let data = zero_shot_dataset(FragmentTag::S, &region, &vocab, per_n, 9).expect("layout");
    for n in 5..=10 {
        let at: Vec<_> = data.iter().filter(|i| i.n1 + i.n2 == n).collect();
        let sat = at.iter().filter(|i| i.label.is_sat()).count();
        println!("n = {n:>2}: {} instances, {sat} sat", at.len());
    }
    let first = zero_shot_prompt(&data[1], PromptStyle::Satisfiable, None).unwrap();
    println!("\n{}\n[expected: {}]", first.text, first.answer);
    let second = zero_shot_prompt(&data[1], PromptStyle::TrueFalse, Some(&data[0])).unwrap();
    println!("\n{}\n[expected: {}]", second.text, second.answer);
}
