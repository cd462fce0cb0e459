//! Lexicons for the unary (noun) and binary (verb) vocabularies.

use std::collections::HashMap;
use std::path::Path;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::GrammarError;

const DEFAULT_NOUNS: &str = include_str!("../../data/nouns.tsv");
const DEFAULT_VERBS: &str = include_str!("../../data/verbs.tsv");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Article {
    A,
    An,
}

impl Article {
    pub fn as_str(self) -> &'static str {
        match self {
            Article::A => "a",
            Article::An => "an",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Noun {
    pub surface: String,
    pub article: Article,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verb {
    pub base: String,
    pub third: String,
}

/// Noun and verb lexicons with reverse lookup tables.
///
/// Nouns name unary predicates, verbs (by base form) name binary predicates.
/// Surface forms are unique within each lexicon and the two name spaces are
/// disjoint, so a predicate name determines its arity.
#[derive(Clone, Debug)]
pub struct Vocabulary {
    nouns: Vec<Noun>,
    verbs: Vec<Verb>,
    noun_index: HashMap<String, usize>,
    verb_base_index: HashMap<String, usize>,
    verb_third_index: HashMap<String, usize>,
}

impl PartialEq for Vocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.nouns == other.nouns && self.verbs == other.verbs
    }
}

fn check_word(word: &str, line: usize) -> Result<(), GrammarError> {
    let ok = !word.is_empty()
        && !word.starts_with("non-")
        && word.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_');
    if ok {
        Ok(())
    } else {
        Err(GrammarError::Lexicon { line, message: format!("invalid word {word:?}") })
    }
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            None
        } else {
            Some((i + 1, line.split('\t').map(str::trim).collect()))
        }
    })
}

pub fn parse_noun_lexicon(text: &str) -> Result<Vec<Noun>, GrammarError> {
    data_lines(text)
        .map(|(line, fields)| {
            if fields.len() != 2 {
                return Err(GrammarError::Lexicon { line, message: "expected `surface<TAB>article`".into() });
            }
            check_word(fields[0], line)?;
            let article = match fields[1] {
                "a" => Article::A,
                "an" => Article::An,
                other => {
                    return Err(GrammarError::Lexicon {
                        line,
                        message: format!("article must be `a` or `an`, got {other:?}"),
                    })
                }
            };
            Ok(Noun { surface: fields[0].to_string(), article })
        })
        .collect()
}

pub fn parse_verb_lexicon(text: &str) -> Result<Vec<Verb>, GrammarError> {
    data_lines(text)
        .map(|(line, fields)| {
            if fields.len() != 2 {
                return Err(GrammarError::Lexicon { line, message: "expected `base<TAB>third_person`".into() });
            }
            check_word(fields[0], line)?;
            check_word(fields[1], line)?;
            Ok(Verb { base: fields[0].to_string(), third: fields[1].to_string() })
        })
        .collect()
}

impl Vocabulary {
    pub fn new(nouns: Vec<Noun>, verbs: Vec<Verb>) -> Result<Self, GrammarError> {
        let mut noun_index = HashMap::new();
        for (i, n) in nouns.iter().enumerate() {
            if noun_index.insert(n.surface.clone(), i).is_some() {
                return Err(GrammarError::DuplicateWord(n.surface.clone()));
            }
        }
        let mut verb_base_index = HashMap::new();
        let mut verb_third_index = HashMap::new();
        for (i, v) in verbs.iter().enumerate() {
            if noun_index.contains_key(&v.base) || noun_index.contains_key(&v.third) {
                return Err(GrammarError::DuplicateWord(v.base.clone()));
            }
            if verb_base_index.insert(v.base.clone(), i).is_some() {
                return Err(GrammarError::DuplicateWord(v.base.clone()));
            }
            if verb_third_index.insert(v.third.clone(), i).is_some() {
                return Err(GrammarError::DuplicateWord(v.third.clone()));
            }
        }
        Ok(Vocabulary { nouns, verbs, noun_index, verb_base_index, verb_third_index })
    }

    /// The shipped lexicons: 156 profession nouns and 70 transitive verbs.
    pub fn default_english() -> Self {
        let nouns = parse_noun_lexicon(DEFAULT_NOUNS).expect("bundled noun lexicon");
        let verbs = parse_verb_lexicon(DEFAULT_VERBS).expect("bundled verb lexicon");
        Vocabulary::new(nouns, verbs).expect("bundled lexicons are consistent")
    }

    pub fn from_files(nouns: &Path, verbs: &Path) -> Result<Self, GrammarError> {
        let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| GrammarError::Io(format!("{}: {e}", p.display())));
        let nouns = parse_noun_lexicon(&read(nouns)?)?;
        let verbs = parse_verb_lexicon(&read(verbs)?)?;
        Vocabulary::new(nouns, verbs)
    }

    pub fn nouns(&self) -> &[Noun] {
        &self.nouns
    }

    pub fn verbs(&self) -> &[Verb] {
        &self.verbs
    }

    pub fn noun(&self, i: usize) -> Option<&Noun> {
        self.nouns.get(i)
    }

    pub fn verb(&self, i: usize) -> Option<&Verb> {
        self.verbs.get(i)
    }

    pub fn noun_index(&self, surface: &str) -> Option<usize> {
        self.noun_index.get(surface).copied()
    }

    pub fn verb_by_base(&self, base: &str) -> Option<usize> {
        self.verb_base_index.get(base).copied()
    }

    pub fn verb_by_third(&self, third: &str) -> Option<usize> {
        self.verb_third_index.get(third).copied()
    }

    /// Appends a noun, failing if the surface form is already taken.
    pub fn push_noun(&mut self, noun: Noun) -> Result<usize, GrammarError> {
        if self.noun_index.contains_key(&noun.surface)
            || self.verb_base_index.contains_key(&noun.surface)
            || self.verb_third_index.contains_key(&noun.surface)
        {
            return Err(GrammarError::DuplicateWord(noun.surface));
        }
        let i = self.nouns.len();
        self.noun_index.insert(noun.surface.clone(), i);
        self.nouns.push(noun);
        Ok(i)
    }

    pub fn push_verb(&mut self, verb: Verb) -> Result<usize, GrammarError> {
        for w in [&verb.base, &verb.third] {
            if self.noun_index.contains_key(w)
                || self.verb_base_index.contains_key(w)
                || self.verb_third_index.contains_key(w)
            {
                return Err(GrammarError::DuplicateWord(w.clone()));
            }
        }
        let i = self.verbs.len();
        self.verb_base_index.insert(verb.base.clone(), i);
        self.verb_third_index.insert(verb.third.clone(), i);
        self.verbs.push(verb);
        Ok(i)
    }

    /// A fresh noun whose surface form starts with `stem`.
    pub fn fresh_noun(&mut self, stem: &str) -> usize {
        let mut k = 0usize;
        loop {
            let surface = format!("{stem}{k}");
            if let Ok(i) = self.push_noun(Noun { surface, article: Article::A }) {
                return i;
            }
            k += 1;
        }
    }

    pub fn fresh_verb(&mut self, stem: &str) -> usize {
        let mut k = 0usize;
        loop {
            let base = format!("{stem}{k}");
            let third = format!("{base}s");
            if let Ok(i) = self.push_verb(Verb { base, third }) {
                return i;
            }
            k += 1;
        }
    }

    /// Uniformly samples `n1` distinct nouns and `n2` distinct verbs.
    pub fn sample_subset<R: Rng + ?Sized>(
        &self,
        n1: usize,
        n2: usize,
        rng: &mut R,
    ) -> Result<VocabSubset, GrammarError> {
        if n1 > self.nouns.len() || n2 > self.verbs.len() {
            return Err(GrammarError::VocabularyTooSmall { nouns: n1, verbs: n2 });
        }
        let mut nouns = index::sample(rng, self.nouns.len(), n1).into_vec();
        let mut verbs = index::sample(rng, self.verbs.len(), n2).into_vec();
        nouns.sort_unstable();
        verbs.sort_unstable();
        Ok(VocabSubset { nouns, verbs })
    }
}

/// Indices of the nouns and verbs one instance draws its slots from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VocabSubset {
    pub nouns: Vec<usize>,
    pub verbs: Vec<usize>,
}

impl VocabSubset {
    pub fn first(n1: usize, n2: usize) -> Self {
        VocabSubset { nouns: (0..n1).collect(), verbs: (0..n2).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_lexicon_sizes() {
        let v = Vocabulary::default_english();
        assert_eq!(v.nouns().len(), 156);
        assert_eq!(v.verbs().len(), 70);
        assert_eq!(v.noun(v.noun_index("artist").unwrap()).unwrap().article, Article::An);
        assert_eq!(v.verb_by_third("admires"), v.verb_by_base("admire"));
    }

    #[test]
    fn lexicon_comments_and_errors() {
        let nouns = parse_noun_lexicon("# header\nowl\tan\n\ncat\ta\n").unwrap();
        assert_eq!(nouns.len(), 2);
        let err = parse_noun_lexicon("owl\tthe\n").unwrap_err();
        assert!(matches!(err, GrammarError::Lexicon { line: 1, .. }));
        assert!(parse_verb_lexicon("see\n").is_err());
    }

    #[test]
    fn duplicate_surface_rejected() {
        let n = parse_noun_lexicon("cat\ta\ncat\ta\n").unwrap();
        assert!(Vocabulary::new(n, vec![]).is_err());
    }

    #[test]
    fn fresh_symbols_do_not_collide() {
        let mut v = Vocabulary::default_english();
        let a = v.fresh_noun("pstar");
        let b = v.fresh_noun("pstar");
        assert_ne!(v.noun(a).unwrap().surface, v.noun(b).unwrap().surface);
        let r = v.fresh_verb("rel");
        assert_eq!(v.verb_by_third(&v.verb(r).unwrap().third), Some(r));
    }
}
