//! Native solvers against the grounding oracle on random small instances.

use fragsat::grammar::{sample_sentence, FragmentTag, SamplingOptions, VocabSubset, Vocabulary};
use fragsat::logic::{translate, Formula, Signature};
use fragsat::solver::{ground_check, model_check, solve, GroundResult, SolveOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn instance(fragment: FragmentTag, rng: &mut ChaCha8Rng, vocab: &Vocabulary) -> Vec<Formula> {
    let n1 = rng.random_range(2..=4);
    let n2 = if fragment.has_verbs() { rng.random_range(1..=2) } else { 0 };
    let m = rng.random_range(2..=8);
    let subset = VocabSubset::first(n1, n2);
    (0..m)
        .map(|_| {
            let s = sample_sentence(fragment, &subset, SamplingOptions::default(), rng).unwrap();
            translate(&s, vocab).unwrap()
        })
        .collect()
}

fn differential(fragment: FragmentTag, cases: usize, depth: usize) {
    let vocab = Vocabulary::default_english();
    let mut rng = ChaCha8Rng::seed_from_u64(fragment as u64 + 17);
    let (mut sat, mut unsat) = (0, 0);
    for case in 0..cases {
        let f = instance(fragment, &mut rng, &vocab);
        let v = solve(fragment, &f, &SolveOptions::default()).unwrap();
        let sig = Signature::from_formulas(&f);
        let g = ground_check(&f, &sig, depth).unwrap();
        match v.label() {
            Some(true) => {
                sat += 1;
                let c = v.certificate().unwrap();
                assert!(model_check(&c.structure, &f).unwrap(), "case {case}: bad certificate for {f:?}");
            }
            Some(false) => {
                unsat += 1;
                assert!(!g.is_model(), "case {case}: native unsat, grounding found a model for {f:?}");
            }
            None => panic!("case {case}: timeout"),
        }
        if let GroundResult::Model(m) = &g {
            assert!(model_check(m, &f).unwrap());
            assert!(v.is_sat(), "case {case}: {f:?}");
        }
    }
    assert!(sat > 0 && unsat > 0, "{fragment}: {sat} sat, {unsat} unsat");
}

#[test]
fn fragment_s_matches_grounding() {
    differential(FragmentTag::S, 300, 4);
}

#[test]
fn fragment_w_matches_grounding() {
    differential(FragmentTag::W, 300, 4);
}

#[test]
fn fragment_v_matches_grounding() {
    differential(FragmentTag::V, 200, 4);
}

#[test]
fn fragment_z_matches_grounding() {
    differential(FragmentTag::Z, 200, 4);
}

#[test]
fn fragment_a_matches_grounding() {
    differential(FragmentTag::A, 200, 4);
}
