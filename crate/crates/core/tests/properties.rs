//! Property tests over generated sentences, records and CNF formulas.

use fragsat::datagen::{emit_jsonl, load_jsonl, Label, LabeledInstance};
use fragsat::grammar::{parse, realize, sample_sentence, FragmentTag, SamplingOptions, Vocabulary};
use fragsat::logic::{parse_fol, render_fol, translate};
use fragsat::solver::{cnf_sat_with, CnfFormula, CnfOptions, CnfResult, Engine};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fragment() -> impl Strategy<Value = FragmentTag> {
    prop_oneof![
        Just(FragmentTag::S),
        Just(FragmentTag::W),
        Just(FragmentTag::V),
        Just(FragmentTag::Z),
        Just(FragmentTag::A),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn realize_parse_translate_round_trip(fragment in fragment(), seed in any::<u64>(), n1 in 1usize..12, n2 in 1usize..6) {
        let vocab = Vocabulary::default_english();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let subset = vocab.sample_subset(n1, if fragment.has_verbs() { n2 } else { 0 }, &mut rng).unwrap();
        let s = sample_sentence(fragment, &subset, SamplingOptions::default(), &mut rng).unwrap();
        let text = realize(&s, &vocab).unwrap();
        prop_assert_eq!(&parse(&text, fragment, &vocab).unwrap(), &s);
        let f = translate(&s, &vocab).unwrap();
        prop_assert_eq!(parse_fol(&render_fol(&f)).unwrap(), f);
    }

    #[test]
    fn jsonl_round_trip(
        m in 1usize..40,
        n1 in 1usize..20,
        n2 in 0usize..9,
        seed in any::<u64>(),
        sat in any::<bool>(),
        ms in proptest::option::of(0.0f64..1e4),
        words in proptest::collection::vec("[a-z \"\\\\é]{0,12}", 1..5),
    ) {
        let inst = LabeledInstance {
            id: format!("X-{seed}"),
            fragment: FragmentTag::Z,
            m,
            n1,
            n2,
            alpha: m as f64 / n1 as f64,
            beta: (n2 > 0).then(|| m as f64 / n2 as f64),
            sentences: words.clone(),
            fol: words,
            label: Label::from_bool(sat),
            seed,
            solver_ms: ms,
            model: sat.then(|| vec![vec!["p".to_string()], vec![]]),
        };
        let mut buf = Vec::new();
        emit_jsonl(std::slice::from_ref(&inst), &mut buf).unwrap();
        prop_assert_eq!(load_jsonl(&buf[..]).unwrap(), vec![inst]);
    }

    #[test]
    fn cnf_engines_agree(seed in any::<u64>(), n in 3usize..14, m in 1usize..60) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = CnfFormula::new(n);
        for _ in 0..m {
            let width = rng.random_range(1..=3);
            let clause = (0..width)
                .map(|_| {
                    let v = rng.random_range(1..=n as i32);
                    if rng.random_bool(0.5) { v } else { -v }
                })
                .collect();
            f.add_clause(clause);
        }
        let brute = (0u32..1 << n).any(|bits| f.evaluate(&(0..n).map(|i| bits >> i & 1 == 1).collect::<Vec<_>>()));
        for engine in [Engine::Dpll, Engine::Cdcl] {
            let (r, _) = cnf_sat_with(&f, &[], &CnfOptions { engine, ..CnfOptions::default() });
            match r {
                CnfResult::Sat(a) => prop_assert!(brute && f.evaluate(&a)),
                CnfResult::Unsat => prop_assert!(!brute),
                CnfResult::Unknown => prop_assert!(false, "no budget was set"),
            }
        }
    }
}
