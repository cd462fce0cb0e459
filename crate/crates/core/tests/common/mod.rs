//! Shared instance generators and independent oracles for the integration
//! tests and the acceptance run.

#![allow(dead_code)]

use std::collections::HashMap;

use fragsat::grammar::{sample_sentence_set, AbstractSentence, FragmentTag, SamplingOptions, Vocabulary};
use fragsat::logic::{translate, Fo2Form, Formula, Signature, SignedNoun};
use fragsat::solver::{ground_check, model_check, solve, SolveOptions, Structure};
use rand::seq::SliceRandom;
use rand::Rng;

pub const FRAGMENTS: [FragmentTag; 5] =
    [FragmentTag::S, FragmentTag::W, FragmentTag::V, FragmentTag::Z, FragmentTag::A];

pub fn deterministic() -> SolveOptions {
    SolveOptions { wall_budget: None, ..SolveOptions::default() }
}

/// Random sentence set with n₁, n₂ and m drawn uniformly from the ranges.
pub fn random_set<R: Rng>(
    fragment: FragmentTag,
    n1: (usize, usize),
    n2: (usize, usize),
    m: (usize, usize),
    vocab: &Vocabulary,
    rng: &mut R,
) -> (Vec<AbstractSentence>, Vec<Formula>) {
    loop {
        let a = rng.random_range(n1.0..=n1.1);
        let b = if fragment.has_verbs() { rng.random_range(n2.0..=n2.1) } else { 0 };
        let count = rng.random_range(m.0..=m.1);
        let subset = vocab.sample_subset(a, b, rng).unwrap();
        // tiny vocabularies cannot always supply m distinct sentences
        let Ok(sentences) = sample_sentence_set(fragment, &subset, count, SamplingOptions::default(), rng) else {
            continue;
        };
        let formulas = sentences.iter().map(|s| translate(s, vocab).unwrap()).collect();
        return (sentences, formulas);
    }
}

fn eval_matrix(f: &Formula, value: &dyn Fn(&str) -> bool) -> bool {
    match f {
        Formula::Unary(p, _) => value(p),
        Formula::Not(g) => !eval_matrix(g, value),
        Formula::And(gs) => gs.iter().all(|g| eval_matrix(g, value)),
        Formula::Or(gs) => gs.iter().any(|g| eval_matrix(g, value)),
        Formula::Implies(a, b) => !eval_matrix(a, value) || eval_matrix(b, value),
        other => panic!("not a monadic matrix: {other:?}"),
    }
}

/// Satisfiability of single-quantifier monadic sentences by enumerating all
/// 2ⁿ truth assignments: sat iff some assignment satisfies every universal
/// matrix and each existential matrix is met by one such assignment.
pub fn brute_force_monadic(formulas: &[Formula]) -> bool {
    let sig = Signature::from_formulas(formulas);
    let n = sig.unary.len();
    assert!(n <= 20 && sig.binary.is_empty());
    let index: HashMap<&str, usize> = sig.unary.iter().enumerate().map(|(i, p)| (p.as_str(), i)).collect();
    let (mut universal, mut existential) = (Vec::new(), Vec::new());
    for f in formulas {
        match f {
            Formula::Forall(_, body) => universal.push(&**body),
            Formula::Exists(_, body) => existential.push(&**body),
            other => panic!("unexpected top level {other:?}"),
        }
    }
    let mut met = vec![false; existential.len()];
    let mut any = false;
    for bits in 0u32..(1 << n) {
        let value = |p: &str| bits >> index[p] & 1 == 1;
        if universal.iter().all(|u| eval_matrix(u, &value)) {
            any = true;
            for (k, e) in existential.iter().enumerate() {
                met[k] |= eval_matrix(e, &value);
            }
        }
    }
    any && met.iter().all(|&m| m)
}

/// Adds a clone of `a`: same unary atoms, the same links to every other
/// element in both directions, and a's diagonal atoms on the a–clone pair.
pub fn clone_element(m: &Structure, a: usize) -> Structure {
    let n = m.size;
    let mut out = Structure::new(n + 1, m.signature.clone());
    for p in 0..m.signature.unary.len() {
        for e in 0..n {
            out.set_unary(p, e, m.unary(p, e));
        }
        out.set_unary(p, n, m.unary(p, a));
    }
    for r in 0..m.signature.binary.len() {
        for x in 0..n {
            for y in 0..n {
                out.set_binary(r, x, y, m.binary(r, x, y));
            }
        }
        for b in (0..n).filter(|&b| b != a) {
            out.set_binary(r, n, b, m.binary(r, a, b));
            out.set_binary(r, b, n, m.binary(r, b, a));
        }
        let d = m.binary(r, a, a);
        out.set_binary(r, n, a, d);
        out.set_binary(r, a, n, d);
        out.set_binary(r, n, n, d);
    }
    out
}

pub fn verdict(fragment: FragmentTag, formulas: &[Formula]) -> Option<bool> {
    solve(fragment, formulas, &deterministic()).unwrap().label()
}

#[derive(Debug, Default)]
pub struct Violations {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl Violations {
    pub fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

/// Sentence permutation must not change the verdict.
pub fn order_invariance<R: Rng>(fragment: FragmentTag, formulas: &[Formula], rng: &mut R) -> bool {
    let mut shuffled = formulas.to_vec();
    shuffled.shuffle(rng);
    verdict(fragment, formulas) == verdict(fragment, &shuffled)
}

/// A bijective renaming of all predicates must not change the verdict.
pub fn renaming_invariance<R: Rng>(fragment: FragmentTag, formulas: &[Formula], rng: &mut R) -> bool {
    let sig = Signature::from_formulas(formulas);
    let mut targets: Vec<usize> = (0..sig.unary.len() + sig.binary.len()).collect();
    targets.shuffle(rng);
    let names: Vec<&String> = sig.unary.iter().chain(&sig.binary).collect();
    let map: HashMap<String, String> =
        names.iter().zip(&targets).map(|(n, &t)| (n.to_string(), format!("zz{t}"))).collect();
    let renamed: Vec<Formula> = formulas.iter().map(|f| f.rename(&|p| map[p].clone())).collect();
    verdict(fragment, formulas) == verdict(fragment, &renamed)
}

/// Negating every occurrence of one predicate must not change the verdict.
pub fn polarity_duality<R: Rng>(fragment: FragmentTag, formulas: &[Formula], rng: &mut R) -> bool {
    let sig = Signature::from_formulas(formulas);
    let names: Vec<&String> = sig.unary.iter().chain(&sig.binary).collect();
    let chosen = names[rng.random_range(0..names.len())];
    let flipped: Vec<Formula> = formulas.iter().map(|f| f.negate_predicate(chosen)).collect();
    // flipping a verb can leave the fragment's surface syntax, so decide
    // both sides with the most general procedure
    let target = if sig.binary.contains(chosen) { FragmentTag::A } else { fragment };
    verdict(fragment, formulas) == verdict(target, &flipped)
}

/// For a random subset Φ of Φ′: Sat(Φ′) implies Sat(Φ).
pub fn anti_monotonicity<R: Rng>(fragment: FragmentTag, formulas: &[Formula], rng: &mut R) -> bool {
    let subset: Vec<Formula> = formulas.iter().filter(|_| rng.random_bool(0.5)).cloned().collect();
    verdict(fragment, formulas) != Some(true) || verdict(fragment, &subset) == Some(true)
}

/// Random collection of the five normal forms over the first nouns/verbs of
/// the vocabulary; returns source formulas and the lowered fragment-A set.
pub fn lowering_case<R: Rng>(rng: &mut R) -> (Vec<usize>, Vec<Formula>, Vec<Formula>) {
    let mut vocab = Vocabulary::default_english();
    let noun = |rng: &mut R| SignedNoun::new(rng.random_range(0..3), rng.random_bool(0.5));
    let count = rng.random_range(2..=6);
    let mut forms = Vec::new();
    for _ in 0..count {
        let form = match rng.random_range(1..=5) {
            1 => Fo2Form::ExistsConj((0..rng.random_range(1..=3)).map(|_| noun(rng)).collect()),
            2 => Fo2Form::ForallDisj((0..rng.random_range(1..=5)).map(|_| noun(rng)).collect()),
            3 => Fo2Form::Matching {
                pairs: (0..rng.random_range(1..=2)).map(|_| (rng.random_range(0..3), rng.random_range(0..3))).collect(),
                r: rng.random_range(0..2),
            },
            4 => Fo2Form::ForallExists {
                p: noun(rng),
                q: noun(rng),
                r: rng.random_range(0..2),
                r_positive: rng.random_bool(0.5),
            },
            _ => Fo2Form::ForallForall {
                p: noun(rng),
                q: noun(rng),
                r: rng.random_range(0..2),
                r_positive: rng.random_bool(0.5),
            },
        };
        forms.push(form);
    }
    let source: Vec<Formula> = forms.iter().map(|f| f.formula(&vocab).unwrap()).collect();
    let mut lowered = Vec::new();
    for form in &forms {
        for s in form.lower(&mut vocab).unwrap() {
            lowered.push(translate(&s, &vocab).unwrap());
        }
    }
    (forms.iter().map(Fo2Form::number).collect(), source, lowered)
}

pub fn ground_sat(formulas: &[Formula], d: usize) -> bool {
    ground_check(formulas, &Signature::from_formulas(formulas), d).unwrap().is_model()
}

pub fn certificate_ok(formulas: &[Formula], m: &Structure) -> bool {
    model_check(m, formulas).unwrap()
}
