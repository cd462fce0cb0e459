//! Sentence templates and the per-fragment inventories.
//!
//! A [`Template`] is one fully expanded alternative: the sentence form, its
//! determiners, and every `(non-)` / `(not)` choice fixed. Inventories are
//! cumulative, `S ⊂ W ⊂ V ⊂ Z ⊂ A`, and listed in a stable order: each
//! fragment's own additions follow its predecessor's inventory.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::GrammarError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FragmentTag {
    S,
    W,
    V,
    Z,
    A,
}

impl FragmentTag {
    pub const ALL: [FragmentTag; 5] = [FragmentTag::S, FragmentTag::W, FragmentTag::V, FragmentTag::Z, FragmentTag::A];

    /// Whether the fragment has transitive verbs (and hence a β axis).
    pub fn has_verbs(self) -> bool {
        matches!(self, FragmentTag::V | FragmentTag::Z | FragmentTag::A)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FragmentTag::S => "S",
            FragmentTag::W => "W",
            FragmentTag::V => "V",
            FragmentTag::Z => "Z",
            FragmentTag::A => "A",
        }
    }

    fn rank(self) -> usize {
        self as usize
    }
}

impl fmt::Display for FragmentTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FragmentTag {
    type Err = GrammarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "S" | "s" => Ok(FragmentTag::S),
            "W" | "w" => Ok(FragmentTag::W),
            "V" | "v" => Ok(FragmentTag::V),
            "Z" | "z" => Ok(FragmentTag::Z),
            "A" | "a" => Ok(FragmentTag::A),
            other => Err(GrammarError::UnknownFragment(other.to_string())),
        }
    }
}

/// Sentence shape, named after the fragment that introduces it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Form {
    /// `Det (non-)p is (not) a (non-)q`
    Copular,
    /// `Det (non-)o who is (not) a p is (not) a (non-)q`
    RelCopular,
    /// `Det (non-)p (does not) r Det (non-)q`
    Transitive,
    /// `Det (non-)o who (does not) r Det (non-)p is (not) a (non-)q`
    RelTransitive,
    /// `Det (non-)o (does not) r Det (non-)p who (does not) s him`
    Anaphoric,
}

impl Form {
    pub fn fragment(self) -> FragmentTag {
        match self {
            Form::Copular => FragmentTag::S,
            Form::RelCopular => FragmentTag::W,
            Form::Transitive => FragmentTag::V,
            Form::RelTransitive => FragmentTag::Z,
            Form::Anaphoric => FragmentTag::A,
        }
    }

    /// Which of the slots `o, p, q` (nouns) and `r, s` (verbs) the form uses.
    pub fn slots(self) -> SlotMask {
        match self {
            Form::Copular => SlotMask::new(&[Slot::P, Slot::Q]),
            Form::RelCopular => SlotMask::new(&[Slot::O, Slot::P, Slot::Q]),
            Form::Transitive => SlotMask::new(&[Slot::P, Slot::Q, Slot::R]),
            Form::RelTransitive => SlotMask::new(&[Slot::O, Slot::P, Slot::Q, Slot::R]),
            Form::Anaphoric => SlotMask::new(&[Slot::O, Slot::P, Slot::R, Slot::S]),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Slot {
    O,
    P,
    Q,
    R,
    S,
}

impl Slot {
    pub fn is_noun(self) -> bool {
        matches!(self, Slot::O | Slot::P | Slot::Q)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SlotMask(u8);

impl SlotMask {
    fn new(slots: &[Slot]) -> Self {
        SlotMask(slots.iter().fold(0, |m, s| m | (1 << *s as u8)))
    }

    pub fn contains(self, slot: Slot) -> bool {
        self.0 & (1 << slot as u8) != 0
    }

    pub fn iter(self) -> impl Iterator<Item = Slot> {
        [Slot::O, Slot::P, Slot::Q, Slot::R, Slot::S].into_iter().filter(move |s| self.contains(*s))
    }
}

/// Subject determiner.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Determiner {
    Every,
    Some,
    No,
}

impl Determiner {
    pub fn word(self) -> &'static str {
        match self {
            Determiner::Every => "Every",
            Determiner::Some => "Some",
            Determiner::No => "No",
        }
    }
}

/// Object determiner. `Some` is the existential choice, spelled `any`
/// when it sits under negation (a `No` subject or `does not`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ObjectDet {
    Some,
    Every,
    No,
}

/// The `(non-)` and `(not)` choices of a template. Flags a form does not
/// use are always `false`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Polarity {
    /// `non-` on the subject noun.
    pub subject_non: bool,
    /// `non-` on the noun under the object determiner.
    pub object_non: bool,
    /// `non-` on the predicate noun after the main copula.
    pub predicate_non: bool,
    /// `is not a` in the main clause.
    pub copula_not: bool,
    /// `who is not a` (relative copula) or `who does not r` (relative verb).
    pub relative_not: bool,
    /// `does not r` in the main clause.
    pub verb_not: bool,
    /// `who does not s him`.
    pub anaphor_not: bool,
}

/// One fully expanded sentence template.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Template {
    pub form: Form,
    pub subject: Determiner,
    pub object: Option<ObjectDet>,
    pub polarity: Polarity,
}

/// Pattern element used by both realization and parsing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tok {
    Word(&'static str),
    /// `a`/`an` agreeing with the noun that follows.
    Article(Slot),
    Noun {
        slot: Slot,
        non: bool,
    },
    VerbThird(Slot),
    VerbBase(Slot),
}

impl Template {
    pub fn fragment(&self) -> FragmentTag {
        self.form.fragment()
    }

    /// Position of this template in the full (fragment A) inventory.
    pub fn id(&self) -> usize {
        template_ids()[self]
    }

    pub fn from_id(id: usize) -> Option<Template> {
        full_inventory().get(id).copied()
    }

    /// The template with all noun-level `non-` choices cleared.
    pub fn base(&self) -> Template {
        let mut t = *self;
        t.polarity.subject_non = false;
        t.polarity.object_non = false;
        t.polarity.predicate_non = false;
        t
    }

    fn object_word(&self, negative_context: bool) -> &'static str {
        match self.object.expect("object determiner") {
            ObjectDet::Some if negative_context => "any",
            ObjectDet::Some => "some",
            ObjectDet::Every => "every",
            ObjectDet::No => "no",
        }
    }

    /// Token pattern for the template.
    pub fn pattern(&self) -> Vec<Tok> {
        use Tok::*;
        let pol = self.polarity;
        let mut out = vec![Word(self.subject.word())];
        let verb = |out: &mut Vec<Tok>, slot: Slot, not: bool| {
            if not {
                out.extend([Word("does"), Word("not"), VerbBase(slot)]);
            } else {
                out.push(VerbThird(slot));
            }
        };
        let copula = |out: &mut Vec<Tok>, not: bool, slot: Slot, non: bool| {
            out.push(Word("is"));
            if not {
                out.push(Word("not"));
            }
            out.push(Article(slot));
            out.push(Noun { slot, non });
        };
        match self.form {
            Form::Copular => {
                out.push(Noun { slot: Slot::P, non: pol.subject_non });
                copula(&mut out, pol.copula_not, Slot::Q, pol.predicate_non);
            }
            Form::RelCopular => {
                out.push(Noun { slot: Slot::O, non: pol.subject_non });
                out.push(Word("who"));
                copula(&mut out, pol.relative_not, Slot::P, false);
                copula(&mut out, pol.copula_not, Slot::Q, pol.predicate_non);
            }
            Form::Transitive => {
                out.push(Noun { slot: Slot::P, non: pol.subject_non });
                verb(&mut out, Slot::R, pol.verb_not);
                let negative = pol.verb_not || self.subject == Determiner::No;
                out.push(Word(self.object_word(negative)));
                out.push(Noun { slot: Slot::Q, non: pol.object_non });
            }
            Form::RelTransitive => {
                out.push(Noun { slot: Slot::O, non: pol.subject_non });
                out.push(Word("who"));
                verb(&mut out, Slot::R, pol.relative_not);
                let negative = pol.relative_not || self.subject == Determiner::No;
                out.push(Word(self.object_word(negative)));
                out.push(Noun { slot: Slot::P, non: pol.object_non });
                copula(&mut out, pol.copula_not, Slot::Q, pol.predicate_non);
            }
            Form::Anaphoric => {
                out.push(Noun { slot: Slot::O, non: pol.subject_non });
                verb(&mut out, Slot::R, pol.verb_not);
                let negative = pol.verb_not || self.subject == Determiner::No;
                out.push(Word(self.object_word(negative)));
                out.push(Noun { slot: Slot::P, non: pol.object_non });
                out.push(Word("who"));
                verb(&mut out, Slot::S, pol.anaphor_not);
                out.push(Word("him"));
            }
        }
        out
    }
}

fn bools() -> [bool; 2] {
    [false, true]
}

fn copular_templates() -> Vec<Template> {
    let mut out = Vec::new();
    for subject in [Determiner::Every, Determiner::No, Determiner::Some] {
        let copula_choices: &[bool] = if subject == Determiner::Some { &[false, true] } else { &[false] };
        for subject_non in bools() {
            for &copula_not in copula_choices {
                for predicate_non in bools() {
                    out.push(Template {
                        form: Form::Copular,
                        subject,
                        object: None,
                        polarity: Polarity { subject_non, copula_not, predicate_non, ..Default::default() },
                    });
                }
            }
        }
    }
    out
}

fn rel_copular_templates() -> Vec<Template> {
    let mut out = Vec::new();
    for subject in [Determiner::Every, Determiner::No, Determiner::Some] {
        let copula_choices: &[bool] = if subject == Determiner::Some { &[false, true] } else { &[false] };
        for subject_non in bools() {
            for relative_not in bools() {
                for &copula_not in copula_choices {
                    for predicate_non in bools() {
                        out.push(Template {
                            form: Form::RelCopular,
                            subject,
                            object: None,
                            polarity: Polarity {
                                subject_non,
                                relative_not,
                                copula_not,
                                predicate_non,
                                ..Default::default()
                            },
                        });
                    }
                }
            }
        }
    }
    out
}

/// (subject, main verb negated, object determiner) combinations of the
/// transitive and anaphoric main clauses.
fn main_clause_choices(with_object_no: bool) -> Vec<(Determiner, bool, ObjectDet)> {
    let mut out = Vec::new();
    for subject in [Determiner::Every, Determiner::Some] {
        out.push((subject, false, ObjectDet::Some));
        out.push((subject, false, ObjectDet::Every));
        if with_object_no {
            out.push((subject, false, ObjectDet::No));
        }
    }
    out.push((Determiner::No, false, ObjectDet::Some));
    out.push((Determiner::No, false, ObjectDet::Every));
    out.push((Determiner::Some, true, ObjectDet::Some));
    out.push((Determiner::Some, true, ObjectDet::Every));
    out
}

fn transitive_templates() -> Vec<Template> {
    let mut out = Vec::new();
    for (subject, verb_not, object) in main_clause_choices(false) {
        for subject_non in bools() {
            for object_non in bools() {
                out.push(Template {
                    form: Form::Transitive,
                    subject,
                    object: Some(object),
                    polarity: Polarity { subject_non, verb_not, object_non, ..Default::default() },
                });
            }
        }
    }
    out
}

fn rel_transitive_templates() -> Vec<Template> {
    let mut out = Vec::new();
    for subject in [Determiner::Every, Determiner::No, Determiner::Some] {
        let copula_choices: &[bool] = if subject == Determiner::Some { &[false, true] } else { &[false] };
        for relative_not in bools() {
            for object in [ObjectDet::Some, ObjectDet::Every] {
                for subject_non in bools() {
                    for object_non in bools() {
                        for &copula_not in copula_choices {
                            for predicate_non in bools() {
                                out.push(Template {
                                    form: Form::RelTransitive,
                                    subject,
                                    object: Some(object),
                                    polarity: Polarity {
                                        subject_non,
                                        relative_not,
                                        object_non,
                                        copula_not,
                                        predicate_non,
                                        ..Default::default()
                                    },
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

fn anaphoric_templates() -> Vec<Template> {
    let mut out = Vec::new();
    for (subject, verb_not, object) in main_clause_choices(true) {
        for subject_non in bools() {
            for object_non in bools() {
                for anaphor_not in bools() {
                    out.push(Template {
                        form: Form::Anaphoric,
                        subject,
                        object: Some(object),
                        polarity: Polarity { subject_non, verb_not, object_non, anaphor_not, ..Default::default() },
                    });
                }
            }
        }
    }
    out
}

fn full_inventory() -> &'static [Template] {
    static INV: OnceLock<Vec<Template>> = OnceLock::new();
    INV.get_or_init(|| {
        let mut all = copular_templates();
        all.extend(rel_copular_templates());
        all.extend(transitive_templates());
        all.extend(rel_transitive_templates());
        all.extend(anaphoric_templates());
        all
    })
}

fn template_ids() -> &'static HashMap<Template, usize> {
    static IDS: OnceLock<HashMap<Template, usize>> = OnceLock::new();
    IDS.get_or_init(|| full_inventory().iter().enumerate().map(|(i, t)| (*t, i)).collect())
}

/// The fully expanded template inventory of `fragment`, in stable order.
pub fn fragment_templates(fragment: FragmentTag) -> &'static [Template] {
    let full = full_inventory();
    let len = full.iter().take_while(|t| t.fragment().rank() <= fragment.rank()).count();
    &full[..len]
}
