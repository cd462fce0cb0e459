//! Monadic fragments against truth-table enumeration, and the lowering of
//! two-variable normal forms against bounded grounding.

mod common;

use common::*;
use fragsat::grammar::{FragmentTag, Vocabulary};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn monadic(fragment: FragmentTag, cases: usize) {
    let vocab = Vocabulary::default_english();
    let mut rng = ChaCha8Rng::seed_from_u64(fragment as u64);
    let (mut sat, mut unsat) = (0, 0);
    for _ in 0..cases {
        let (_, f) = random_set(fragment, (1, 8), (0, 0), (1, 30), &vocab, &mut rng);
        let expected = brute_force_monadic(&f);
        assert_eq!(verdict(fragment, &f), Some(expected), "{f:?}");
        if expected {
            sat += 1;
        } else {
            unsat += 1;
        }
    }
    assert!(sat > cases / 10 && unsat > cases / 10, "{sat} sat, {unsat} unsat");
}

#[test]
fn fragment_s_matches_truth_tables() {
    monadic(FragmentTag::S, 1000);
}

#[test]
fn fragment_w_matches_truth_tables() {
    monadic(FragmentTag::W, 1000);
}

#[test]
fn lowering_is_equisatisfiable() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut seen = [false; 5];
    let (mut sat, mut unsat) = (0, 0);
    for _ in 0..60 {
        let (forms, source, lowered) = lowering_case(&mut rng);
        for n in forms {
            seen[n - 1] = true;
        }
        let a = ground_sat(&source, 3);
        assert_eq!(a, ground_sat(&lowered, 3), "{source:?}");
        if a {
            sat += 1;
        } else {
            unsat += 1;
        }
    }
    assert!(seen.iter().all(|&s| s));
    assert!(sat > 0 && unsat > 0);
}
