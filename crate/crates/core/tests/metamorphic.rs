//! Verdict-preserving transformations and clone closure of certificates.

mod common;

use common::*;
use fragsat::grammar::{FragmentTag, Vocabulary};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Relation = fn(FragmentTag, &[fragsat::logic::Formula], &mut ChaCha8Rng) -> bool;

fn suite(relation: Relation, name: &str, per_fragment: usize) {
    let vocab = Vocabulary::default_english();
    let mut rng = ChaCha8Rng::seed_from_u64(name.len() as u64);
    let mut v = Violations::default();
    for fragment in FRAGMENTS {
        for _ in 0..per_fragment {
            let (_, f) = random_set(fragment, (2, 6), (1, 3), (2, 14), &vocab, &mut rng);
            v.record(relation(fragment, &f, &mut rng), || format!("{fragment}: {f:?}"));
        }
    }
    assert!(v.failures.is_empty(), "{name}: {} of {} violated, first {:?}", v.failures.len(), v.checked, v.failures[0]);
}

#[test]
fn order_invariance_holds() {
    suite(order_invariance, "order", 60);
}

#[test]
fn renaming_invariance_holds() {
    suite(renaming_invariance, "renaming", 60);
}

#[test]
fn polarity_duality_holds() {
    suite(polarity_duality, "polarity", 60);
}

#[test]
fn anti_monotonicity_holds() {
    suite(anti_monotonicity, "anti-monotonicity", 60);
}

#[test]
fn certificates_are_closed_under_cloning() {
    let vocab = Vocabulary::default_english();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    while checked < 200 {
        let fragment = FRAGMENTS[rng.random_range(0..5)];
        let (_, f) = random_set(fragment, (2, 5), (1, 3), (2, 10), &vocab, &mut rng);
        let v = fragsat::solver::solve(fragment, &f, &deterministic()).unwrap();
        let Some(c) = v.certificate() else { continue };
        let a = rng.random_range(0..c.structure.size);
        let cloned = clone_element(&c.structure, a);
        assert!(certificate_ok(&f, &cloned), "clone of {a} breaks {f:?}");
        assert_eq!(cloned, c.structure.duplicate(a));
        checked += 1;
    }
}
