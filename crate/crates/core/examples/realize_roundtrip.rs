//! Samples abstract sentences of every fragment, realizes them in English
//! and parses the text back.
//!
//! `cargo run --example realize_roundtrip -- 5`

use fragsat::grammar::{fragment_templates, parse, realize, sample_sentence, FragmentTag, SamplingOptions, Vocabulary};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let per_fragment: usize = std::env::args().nth(1).map_or(4, |a| a.parse().expect("count"));
    let vocab = Vocabulary::default_english();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for fragment in [FragmentTag::S, FragmentTag::W, FragmentTag::V, FragmentTag::Z, FragmentTag::A] {
        println!("{fragment}: {} templates", fragment_templates(fragment).len());
        let subset = vocab.sample_subset(4, if fragment.has_verbs() { 2 } else { 0 }, &mut rng).expect("subset");
        for _ in 0..per_fragment {
            let s = sample_sentence(fragment, &subset, SamplingOptions::default(), &mut rng).expect("sample");
            let text = realize(&s, &vocab).expect("realize");
            let back = parse(&text, fragment, &vocab).expect("parse");
            assert_eq!(back, s, "round trip of {text:?}");
            println!("  {text}");
        }
    }
}
