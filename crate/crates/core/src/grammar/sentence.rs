use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::template::{fragment_templates, FragmentTag, Slot, Template, Tok};
use super::vocab::{VocabSubset, Vocabulary};
use super::GrammarError;

/// A template instance: the template plus lexicon indices for its slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AbstractSentence {
    pub fragment: FragmentTag,
    pub template: Template,
    pub o: Option<usize>,
    pub p: Option<usize>,
    pub q: Option<usize>,
    pub r: Option<usize>,
    pub s: Option<usize>,
}

impl AbstractSentence {
    pub fn new(fragment: FragmentTag, template: Template) -> Self {
        AbstractSentence { fragment, template, o: None, p: None, q: None, r: None, s: None }
    }

    pub fn slot(&self, slot: Slot) -> Option<usize> {
        match slot {
            Slot::O => self.o,
            Slot::P => self.p,
            Slot::Q => self.q,
            Slot::R => self.r,
            Slot::S => self.s,
        }
    }

    pub fn set_slot(&mut self, slot: Slot, value: usize) {
        let target = match slot {
            Slot::O => &mut self.o,
            Slot::P => &mut self.p,
            Slot::Q => &mut self.q,
            Slot::R => &mut self.r,
            Slot::S => &mut self.s,
        };
        *target = Some(value);
    }

    pub fn with(mut self, slot: Slot, value: usize) -> Self {
        self.set_slot(slot, value);
        self
    }

    /// Slots are bound exactly where the template expects them.
    pub fn is_well_formed(&self) -> bool {
        let mask = self.template.form.slots();
        [Slot::O, Slot::P, Slot::Q, Slot::R, Slot::S].into_iter().all(|s| mask.contains(s) == self.slot(s).is_some())
            && self.template.fragment() <= self.fragment
    }
}

/// How templates are drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum TemplateLaw {
    /// Uniform over the fully expanded inventory.
    #[default]
    Expanded,
    /// Uniform over base forms, then uniform over their `non-` expansions.
    Base,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingOptions {
    pub law: TemplateLaw,
    /// Forbid the same noun (verb) in two slots of one sentence.
    pub distinct_slots: bool,
}

fn bases(fragment: FragmentTag) -> &'static [Vec<Template>] {
    static BASES: OnceLock<Vec<Vec<Vec<Template>>>> = OnceLock::new();
    let all = BASES.get_or_init(|| {
        FragmentTag::ALL
            .iter()
            .map(|f| {
                let mut groups: Vec<Vec<Template>> = Vec::new();
                for t in fragment_templates(*f) {
                    match groups.iter_mut().find(|g| g[0].base() == t.base()) {
                        Some(g) => g.push(*t),
                        None => groups.push(vec![*t]),
                    }
                }
                groups
            })
            .collect()
    });
    &all[fragment as usize]
}

/// Draws one sentence of `fragment` over the given vocabulary subset.
pub fn sample_sentence<R: Rng + ?Sized>(
    fragment: FragmentTag,
    subset: &VocabSubset,
    options: SamplingOptions,
    rng: &mut R,
) -> Result<AbstractSentence, GrammarError> {
    if fragment.has_verbs() && subset.verbs.is_empty() {
        return Err(GrammarError::NoVerbs(fragment));
    }
    if subset.nouns.is_empty() {
        return Err(GrammarError::VocabularyTooSmall { nouns: 1, verbs: 0 });
    }
    let template = match options.law {
        TemplateLaw::Expanded => {
            let inv = fragment_templates(fragment);
            inv[rng.random_range(0..inv.len())]
        }
        TemplateLaw::Base => {
            let groups = bases(fragment);
            let g = &groups[rng.random_range(0..groups.len())];
            g[rng.random_range(0..g.len())]
        }
    };
    let mut sentence = AbstractSentence::new(fragment, template);
    let slots: Vec<Slot> = template.form.slots().iter().collect();
    if options.distinct_slots {
        let noun_slots = slots.iter().filter(|s| s.is_noun()).count();
        let verb_slots = slots.len() - noun_slots;
        if noun_slots > subset.nouns.len() || verb_slots > subset.verbs.len() {
            return Err(GrammarError::NotEnoughDistinct { nouns: subset.nouns.len(), verbs: subset.verbs.len() });
        }
        let nouns = rand::seq::index::sample(rng, subset.nouns.len(), noun_slots);
        let verbs = rand::seq::index::sample(rng, subset.verbs.len(), verb_slots);
        let (mut ni, mut vi) = (nouns.iter(), verbs.iter());
        for slot in slots {
            let value = if slot.is_noun() {
                subset.nouns[ni.next().expect("counted")]
            } else {
                subset.verbs[vi.next().expect("counted")]
            };
            sentence.set_slot(slot, value);
        }
    } else {
        for slot in slots {
            let pool = if slot.is_noun() { &subset.nouns } else { &subset.verbs };
            sentence.set_slot(slot, pool[rng.random_range(0..pool.len())]);
        }
    }
    Ok(sentence)
}

/// Draws `m` pairwise distinct sentences, resampling collisions. Fails once
/// `64·m` draws have been spent without filling the set.
pub fn sample_sentence_set<R: Rng + ?Sized>(
    fragment: FragmentTag,
    subset: &VocabSubset,
    m: usize,
    options: SamplingOptions,
    rng: &mut R,
) -> Result<Vec<AbstractSentence>, GrammarError> {
    let mut seen = std::collections::HashSet::with_capacity(m);
    let mut out = Vec::with_capacity(m);
    let mut draws = 0usize;
    while out.len() < m {
        if draws >= 64 * m.max(1) {
            return Err(GrammarError::SetTooLarge { m, found: out.len() });
        }
        draws += 1;
        let s = sample_sentence(fragment, subset, options, rng)?;
        if seen.insert(s) {
            out.push(s);
        }
    }
    Ok(out)
}

/// Surface string of a sentence (no trailing period).
pub fn realize(sentence: &AbstractSentence, vocab: &Vocabulary) -> Result<String, GrammarError> {
    let pattern = sentence.template.pattern();
    let mut words: Vec<String> = Vec::with_capacity(pattern.len());
    for (i, tok) in pattern.iter().enumerate() {
        let noun =
            |slot: Slot| sentence.slot(slot).and_then(|i| vocab.noun(i)).ok_or(GrammarError::UnresolvableSlot { slot });
        let verb =
            |slot: Slot| sentence.slot(slot).and_then(|i| vocab.verb(i)).ok_or(GrammarError::UnresolvableSlot { slot });
        let word = match *tok {
            Tok::Word(w) => w.to_string(),
            Tok::Article(slot) => {
                let negated = matches!(pattern.get(i + 1), Some(Tok::Noun { non: true, .. }));
                if negated {
                    "a".to_string()
                } else {
                    noun(slot)?.article.as_str().to_string()
                }
            }
            Tok::Noun { slot, non } => {
                let n = noun(slot)?;
                if non {
                    format!("non-{}", n.surface)
                } else {
                    n.surface.clone()
                }
            }
            Tok::VerbThird(slot) => verb(slot)?.third.clone(),
            Tok::VerbBase(slot) => verb(slot)?.base.clone(),
        };
        words.push(word);
    }
    Ok(words.join(" "))
}

struct ParseTable {
    /// (template, pattern) per fragment, longest pattern first.
    entries: Vec<Vec<(Template, Vec<Tok>)>>,
}

fn parse_table() -> &'static ParseTable {
    static TABLE: OnceLock<ParseTable> = OnceLock::new();
    TABLE.get_or_init(|| ParseTable {
        entries: FragmentTag::ALL
            .iter()
            .map(|f| {
                let mut v: Vec<_> = fragment_templates(*f).iter().map(|t| (*t, t.pattern())).collect();
                v.sort_by_key(|(_, p)| std::cmp::Reverse(p.len()));
                v
            })
            .collect(),
    })
}

enum Match {
    Full(AbstractSentence),
    Structural { unknown: String },
    None,
}

fn match_pattern(
    fragment: FragmentTag,
    template: Template,
    pattern: &[Tok],
    tokens: &[&str],
    vocab: &Vocabulary,
) -> Match {
    if pattern.len() != tokens.len() {
        return Match::None;
    }
    let mut sentence = AbstractSentence::new(fragment, template);
    let mut unknown: Option<String> = None;
    for (i, (tok, word)) in pattern.iter().zip(tokens).enumerate() {
        match *tok {
            Tok::Word(w) => {
                let ok = if i == 0 { w.eq_ignore_ascii_case(word) } else { w == *word };
                if !ok {
                    return Match::None;
                }
            }
            Tok::Article(_) => {
                if *word != "a" && *word != "an" {
                    return Match::None;
                }
            }
            Tok::Noun { slot, non } => {
                let stem = match word.strip_prefix("non-") {
                    Some(rest) if non => rest,
                    None if !non => word,
                    _ => return Match::None,
                };
                match vocab.noun_index(stem) {
                    Some(n) => {
                        let expected = if non { "a" } else { vocab.nouns()[n].article.as_str() };
                        if i > 0 && matches!(pattern[i - 1], Tok::Article(_)) && tokens[i - 1] != expected {
                            return Match::None;
                        }
                        sentence.set_slot(slot, n);
                    }
                    None => {
                        unknown.get_or_insert_with(|| stem.to_string());
                    }
                }
            }
            Tok::VerbThird(slot) => match vocab.verb_by_third(word) {
                Some(v) => sentence.set_slot(slot, v),
                None => {
                    unknown.get_or_insert_with(|| word.to_string());
                }
            },
            Tok::VerbBase(slot) => match vocab.verb_by_base(word) {
                Some(v) => sentence.set_slot(slot, v),
                None => {
                    unknown.get_or_insert_with(|| word.to_string());
                }
            },
        }
    }
    match unknown {
        Some(w) => Match::Structural { unknown: w },
        None => Match::Full(sentence),
    }
}

/// Normalizes whitespace and drops one trailing period.
fn normalize_text(text: &str) -> String {
    let t = text.trim();
    let t = t.strip_suffix('.').unwrap_or(t);
    t.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Parses one surface sentence of `fragment` back into abstract form.
pub fn parse(text: &str, fragment: FragmentTag, vocab: &Vocabulary) -> Result<AbstractSentence, GrammarError> {
    let normalized = normalize_text(text);
    let tokens: Vec<&str> = normalized.split(' ').collect();
    let mut found: Vec<AbstractSentence> = Vec::new();
    let mut unknown: Option<String> = None;
    for (template, pattern) in &parse_table().entries[fragment as usize] {
        match match_pattern(fragment, *template, pattern, &tokens, vocab) {
            Match::Full(s) => found.push(s),
            Match::Structural { unknown: w } => {
                unknown.get_or_insert(w);
            }
            Match::None => {}
        }
    }
    match found.len() {
        1 => Ok(found[0]),
        0 => match unknown {
            Some(word) => Err(GrammarError::UnknownWord { word }),
            None => Err(GrammarError::NoTemplateMatch { fragment, text: normalized }),
        },
        count => Err(GrammarError::AmbiguousParse { text: normalized, count }),
    }
}

/// Splits running text into sentences on periods and line breaks.
pub fn split_sentences(text: &str) -> Vec<String> {
    text.split(['.', '\n'])
        .map(|s| s.split_whitespace().collect::<Vec<_>>().join(" "))
        .filter(|s| !s.is_empty())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{Determiner, Form, ObjectDet, Polarity};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn vocab() -> Vocabulary {
        Vocabulary::default_english()
    }

    fn n(v: &Vocabulary, w: &str) -> usize {
        v.noun_index(w).unwrap()
    }

    fn vb(v: &Vocabulary, w: &str) -> usize {
        v.verb_by_base(w).unwrap()
    }

    #[test]
    fn realize_copular_with_negated_subject() {
        let v = vocab();
        let t = Template {
            form: Form::Copular,
            subject: Determiner::Every,
            object: None,
            polarity: Polarity { subject_non: true, ..Default::default() },
        };
        let s =
            AbstractSentence::new(FragmentTag::S, t).with(Slot::P, n(&v, "artist")).with(Slot::Q, n(&v, "beekeeper"));
        assert_eq!(realize(&s, &v).unwrap(), "Every non-artist is a beekeeper");
        assert_eq!(parse("Every non-artist is a beekeeper", FragmentTag::S, &v).unwrap(), s);
    }

    #[test]
    fn realize_relative_transitive() {
        let v = vocab();
        let t = Template {
            form: Form::RelTransitive,
            subject: Determiner::Every,
            object: Some(ObjectDet::Some),
            polarity: Polarity::default(),
        };
        let s = AbstractSentence::new(FragmentTag::Z, t)
            .with(Slot::O, n(&v, "carpenter"))
            .with(Slot::R, vb(&v, "admire"))
            .with(Slot::P, n(&v, "writer"))
            .with(Slot::Q, n(&v, "electrician"));
        assert_eq!(realize(&s, &v).unwrap(), "Every carpenter who admires some writer is an electrician");
    }

    #[test]
    fn realize_anaphora_with_object_no() {
        let v = vocab();
        let t = Template {
            form: Form::Anaphoric,
            subject: Determiner::Some,
            object: Some(ObjectDet::No),
            polarity: Polarity::default(),
        };
        let s = AbstractSentence::new(FragmentTag::A, t)
            .with(Slot::O, n(&v, "artist"))
            .with(Slot::R, vb(&v, "hate"))
            .with(Slot::P, n(&v, "beekeeper"))
            .with(Slot::S, vb(&v, "admire"));
        assert_eq!(realize(&s, &v).unwrap(), "Some artist hates no beekeeper who admires him");
        assert_eq!(parse("Some artist hates no beekeeper who admires him.", FragmentTag::A, &v).unwrap(), s);
    }

    #[test]
    fn any_under_negation() {
        let v = vocab();
        let s = parse("No artist admires any beekeeper", FragmentTag::V, &v).unwrap();
        assert_eq!(s.template.object, Some(ObjectDet::Some));
        let s = parse("Some artist does not admire every beekeeper", FragmentTag::V, &v).unwrap();
        assert!(s.template.polarity.verb_not);
        assert!(parse("No artist admires some beekeeper", FragmentTag::V, &v).is_err());
    }

    #[test]
    fn parse_errors() {
        let v = vocab();
        assert!(matches!(
            parse("Every carrot implies apples", FragmentTag::S, &v),
            Err(GrammarError::NoTemplateMatch { .. })
        ));
        assert!(matches!(
            parse("Every carrot is a beekeeper", FragmentTag::S, &v),
            Err(GrammarError::UnknownWord { word }) if word == "carrot"
        ));
        // out of fragment: transitive sentence in S
        assert!(matches!(
            parse("Every artist admires some beekeeper", FragmentTag::S, &v),
            Err(GrammarError::NoTemplateMatch { .. })
        ));
        // wrong article
        assert!(parse("Every baker is an beekeeper", FragmentTag::S, &v).is_err());
    }

    #[test]
    fn unresolvable_slot() {
        let v = vocab();
        let t = fragment_templates(FragmentTag::S)[0];
        let s = AbstractSentence::new(FragmentTag::S, t).with(Slot::P, 0).with(Slot::Q, 10_000);
        assert_eq!(realize(&s, &v), Err(GrammarError::UnresolvableSlot { slot: Slot::Q }));
    }

    #[test]
    fn sampling_is_deterministic_and_contained() {
        let v = vocab();
        let subset = VocabSubset { nouns: vec![3, 7, 11], verbs: vec![2, 5, 9] };
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..50)
                .map(|_| sample_sentence(FragmentTag::A, &subset, SamplingOptions::default(), &mut rng).unwrap())
                .collect::<Vec<_>>()
        };
        let a = draw(7);
        assert_eq!(a, draw(7));
        for s in &a {
            assert!(s.is_well_formed());
            for slot in s.template.form.slots().iter() {
                let pool = if slot.is_noun() { &subset.nouns } else { &subset.verbs };
                assert!(pool.contains(&s.slot(slot).unwrap()));
            }
            realize(s, &v).unwrap();
        }
    }

    #[test]
    fn sampling_rejects_missing_verbs() {
        let subset = VocabSubset { nouns: vec![0, 1], verbs: vec![] };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for f in [FragmentTag::V, FragmentTag::Z, FragmentTag::A] {
            assert_eq!(
                sample_sentence(f, &subset, SamplingOptions::default(), &mut rng),
                Err(GrammarError::NoVerbs(f))
            );
        }
        assert!(sample_sentence(FragmentTag::S, &subset, SamplingOptions::default(), &mut rng).is_ok());
    }

    #[test]
    fn distinct_slots() {
        let subset = VocabSubset { nouns: vec![0, 1, 2], verbs: vec![0, 1] };
        let opts = SamplingOptions { distinct_slots: true, ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let s = sample_sentence(FragmentTag::A, &subset, opts, &mut rng).unwrap();
            let nouns: Vec<_> = [s.o, s.p, s.q].into_iter().flatten().collect();
            let mut dedup = nouns.clone();
            dedup.sort();
            dedup.dedup();
            assert_eq!(nouns.len(), dedup.len());
            if let (Some(r), Some(x)) = (s.r, s.s) {
                assert_ne!(r, x);
            }
        }
        let tiny = VocabSubset { nouns: vec![0], verbs: vec![0] };
        assert!(sample_sentence(FragmentTag::S, &tiny, opts, &mut rng).is_err());
    }

    #[test]
    fn split_text() {
        assert_eq!(
            split_sentences("Every artist is a beekeeper. Some artist is not a beekeeper."),
            vec!["Every artist is a beekeeper", "Some artist is not a beekeeper"]
        );
    }
}
