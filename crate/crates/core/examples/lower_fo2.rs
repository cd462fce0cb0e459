//! Lowers two-variable normal-form clauses into fragment-A sentences and
//! checks equisatisfiability by bounded grounding.
//!
//! `cargo run --release --example lower_fo2`

use fragsat::grammar::{realize, Vocabulary};
use fragsat::logic::{translate, Fo2Form, Signature, SignedNoun};
use fragsat::solver::ground_check;

fn main() {
    let mut vocab = Vocabulary::default_english();
    let (p, q) = (vocab.noun_index("artist").unwrap(), vocab.noun_index("baker").unwrap());
    let r = vocab.verb_by_base("admire").unwrap();
    let forms = vec![
        Fo2Form::ExistsConj(vec![SignedNoun::new(p, true), SignedNoun::new(q, false)]),
        Fo2Form::ForallDisj(vec![SignedNoun::new(p, false), SignedNoun::new(q, true), SignedNoun::new(p, true)]),
        Fo2Form::Matching { pairs: vec![(p, q)], r },
        Fo2Form::ForallExists { p: SignedNoun::new(p, true), q: SignedNoun::new(q, true), r, r_positive: true },
        Fo2Form::ForallForall { p: SignedNoun::new(q, true), q: SignedNoun::new(p, true), r, r_positive: false },
    ];
    let mut source = Vec::new();
    let mut lowered = Vec::new();
    for form in &forms {
        let f = form.formula(&vocab).unwrap();
        println!("({}) {}", form.number(), f.render());
        source.push(f);
        for s in form.lower(&mut vocab).unwrap() {
            println!("      {}", realize(&s, &vocab).unwrap());
            lowered.push(translate(&s, &vocab).unwrap());
        }
    }
    let a = ground_check(&source, &Signature::from_formulas(&source), 3).unwrap();
    let b = ground_check(&lowered, &Signature::from_formulas(&lowered), 3).unwrap();
    println!("source satisfiable up to 3: {}, lowered: {}", a.is_model(), b.is_model());
    assert_eq!(a.is_model(), b.is_model());
}
