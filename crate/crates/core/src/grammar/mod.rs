//! Controlled English fragments: vocabularies, template inventories,
//! sentence sampling, realization and parsing.

mod sentence;
mod template;
mod vocab;

pub use sentence::{
    parse, realize, sample_sentence, sample_sentence_set, split_sentences, AbstractSentence, SamplingOptions,
    TemplateLaw,
};
pub use template::{
    fragment_templates, Determiner, Form, FragmentTag, ObjectDet, Polarity, Slot, SlotMask, Template, Tok,
};
pub use vocab::{parse_noun_lexicon, parse_verb_lexicon, Article, Noun, Verb, VocabSubset, Vocabulary};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrammarError {
    #[error("lexicon line {line}: {message}")]
    Lexicon { line: usize, message: String },
    #[error("duplicate word {0:?} in vocabulary")]
    DuplicateWord(String),
    #[error("vocabulary too small for {nouns} nouns and {verbs} verbs")]
    VocabularyTooSmall { nouns: usize, verbs: usize },
    #[error("unknown fragment {0:?}")]
    UnknownFragment(String),
    #[error("fragment {0} needs at least one verb")]
    NoVerbs(FragmentTag),
    #[error("cannot fill slots without repetition from {nouns} nouns and {verbs} verbs")]
    NotEnoughDistinct { nouns: usize, verbs: usize },
    #[error("slot {slot:?} is unbound or out of range")]
    UnresolvableSlot { slot: Slot },
    #[error("no template of fragment {fragment} matches {text:?}")]
    NoTemplateMatch { fragment: FragmentTag, text: String },
    #[error("unknown word {word:?}")]
    UnknownWord { word: String },
    #[error("{count} templates match {text:?}")]
    AmbiguousParse { text: String, count: usize },
    #[error("could only draw {found} of {m} distinct sentences")]
    SetTooLarge { m: usize, found: usize },
    #[error("{0}")]
    Io(String),
}
