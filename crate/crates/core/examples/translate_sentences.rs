//! Parses English sentences of a fragment and prints their first-order
//! translation and an SMT-LIB script.
//!
//! `cargo run --example translate_sentences -- V "Every artist admires some baker. No baker admires any artist."`

use fragsat::grammar::{parse, split_sentences, FragmentTag, Vocabulary};
use fragsat::logic::{render_fol, to_smtlib, translate, Signature};

fn main() {
    let mut args = std::env::args().skip(1);
    let fragment: FragmentTag = args.next().as_deref().unwrap_or("V").parse().expect("fragment tag");
    let text = args.next().unwrap_or_else(|| {
        "Every artist admires some baker. No baker admires any artist. Some artist is an artist".into()
    });
    let vocab = Vocabulary::default_english();
    let mut formulas = Vec::new();
    for sentence in split_sentences(&text) {
        let s = parse(&sentence, fragment, &vocab).unwrap_or_else(|e| panic!("{sentence:?}: {e}"));
        let f = translate(&s, &vocab).expect("translatable");
        println!("{sentence:<45} {}", render_fol(&f));
        formulas.push(f);
    }
    println!();
    print!("{}", to_smtlib(&formulas, &Signature::from_formulas(&formulas)));
}
