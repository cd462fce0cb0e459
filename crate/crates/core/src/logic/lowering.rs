//! Simulation of the five FO² formula shapes used in tiling reductions by
//! sets of fragment-A sentences.
//!
//! ```text
//! (1) ∃x (±p₁(x) ∧ … ∧ ±pₙ(x))
//! (2) ∀x (±p₁(x) ∨ … ∨ ±pₙ(x))
//! (3) ∀x∀y (⋀ᵢ (pᵢ(x) ↔ qᵢ(y)) → r(x,y))
//! (4) ∀x (±p(x) → ∃y (±q(y) ∧ ±r(x,y)))
//! (5) ∀x (±p(x) → ∀y (±q(y) → ±r(x,y)))
//! ```
//!
//! Each lowering is equisatisfiable with its source; forms (1)–(3) add
//! fresh nouns or verbs to the vocabulary.

use serde::{Deserialize, Serialize};

use crate::grammar::{
    AbstractSentence, Determiner, Form, FragmentTag, ObjectDet, Polarity, Slot, Template, Vocabulary,
};

use super::formula::{Formula, Var};
use super::LogicError;

/// A possibly negated noun (lexicon index).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedNoun {
    pub noun: usize,
    pub positive: bool,
}

impl SignedNoun {
    pub fn new(noun: usize, positive: bool) -> Self {
        SignedNoun { noun, positive }
    }

    fn neg(self) -> Self {
        SignedNoun { noun: self.noun, positive: !self.positive }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Fo2Form {
    ExistsConj(Vec<SignedNoun>),
    ForallDisj(Vec<SignedNoun>),
    /// Pairs `(pᵢ, qᵢ)` of nouns and the verb `r`.
    Matching {
        pairs: Vec<(usize, usize)>,
        r: usize,
    },
    ForallExists {
        p: SignedNoun,
        q: SignedNoun,
        r: usize,
        r_positive: bool,
    },
    ForallForall {
        p: SignedNoun,
        q: SignedNoun,
        r: usize,
        r_positive: bool,
    },
}

fn noun_atom(vocab: &Vocabulary, n: usize, var: Var) -> Result<Formula, LogicError> {
    let noun = vocab.noun(n).ok_or(LogicError::UnresolvableSlot(Slot::P))?;
    Ok(Formula::unary(&noun.surface, var))
}

fn signed(vocab: &Vocabulary, n: SignedNoun, var: Var) -> Result<Formula, LogicError> {
    Ok(noun_atom(vocab, n.noun, var)?.signed(n.positive))
}

fn verb_atom(vocab: &Vocabulary, r: usize, a: Var, b: Var) -> Result<Formula, LogicError> {
    let verb = vocab.verb(r).ok_or(LogicError::UnresolvableSlot(Slot::R))?;
    Ok(Formula::binary(&verb.base, a, b))
}

fn copular(subject: Determiner, p: SignedNoun, q: SignedNoun) -> AbstractSentence {
    let t = Template {
        form: Form::Copular,
        subject,
        object: None,
        polarity: Polarity { subject_non: !p.positive, predicate_non: !q.positive, ..Default::default() },
    };
    AbstractSentence::new(FragmentTag::A, t).with(Slot::P, p.noun).with(Slot::Q, q.noun)
}

/// `Every ±o who is (not) a p is a ±q`.
fn rel_copular(o: SignedNoun, p: SignedNoun, q: SignedNoun) -> AbstractSentence {
    let t = Template {
        form: Form::RelCopular,
        subject: Determiner::Every,
        object: None,
        polarity: Polarity {
            subject_non: !o.positive,
            relative_not: !p.positive,
            predicate_non: !q.positive,
            ..Default::default()
        },
    };
    AbstractSentence::new(FragmentTag::A, t).with(Slot::O, o.noun).with(Slot::P, p.noun).with(Slot::Q, q.noun)
}

fn transitive(subject: Determiner, object: ObjectDet, p: SignedNoun, q: SignedNoun, r: usize) -> AbstractSentence {
    let t = Template {
        form: Form::Transitive,
        subject,
        object: Some(object),
        polarity: Polarity { subject_non: !p.positive, object_non: !q.positive, ..Default::default() },
    };
    AbstractSentence::new(FragmentTag::A, t).with(Slot::P, p.noun).with(Slot::Q, q.noun).with(Slot::R, r)
}

/// `Every ±o r's every ±p who s's him`.
fn anaphoric_every(o: SignedNoun, p: SignedNoun, r: usize, s: usize) -> AbstractSentence {
    let t = Template {
        form: Form::Anaphoric,
        subject: Determiner::Every,
        object: Some(ObjectDet::Every),
        polarity: Polarity { subject_non: !o.positive, object_non: !p.positive, ..Default::default() },
    };
    AbstractSentence::new(FragmentTag::A, t)
        .with(Slot::O, o.noun)
        .with(Slot::P, p.noun)
        .with(Slot::R, r)
        .with(Slot::S, s)
}

impl Fo2Form {
    /// Form number, 1 to 5.
    pub fn number(&self) -> usize {
        match self {
            Fo2Form::ExistsConj(_) => 1,
            Fo2Form::ForallDisj(_) => 2,
            Fo2Form::Matching { .. } => 3,
            Fo2Form::ForallExists { .. } => 4,
            Fo2Form::ForallForall { .. } => 5,
        }
    }

    /// The source formula itself.
    pub fn formula(&self, vocab: &Vocabulary) -> Result<Formula, LogicError> {
        let (x, y) = (Var::X, Var::Y);
        Ok(match self {
            Fo2Form::ExistsConj(lits) => {
                let items = lits.iter().map(|l| signed(vocab, *l, x)).collect::<Result<Vec<_>, _>>()?;
                if items.is_empty() {
                    return Err(LogicError::EmptyForm(1));
                }
                Formula::exists(x, Formula::conj(items))
            }
            Fo2Form::ForallDisj(lits) => {
                let items = lits.iter().map(|l| signed(vocab, *l, x)).collect::<Result<Vec<_>, _>>()?;
                if items.is_empty() {
                    return Err(LogicError::EmptyForm(2));
                }
                Formula::forall(x, Formula::disj(items))
            }
            Fo2Form::Matching { pairs, r } => {
                if pairs.is_empty() {
                    return Err(LogicError::EmptyForm(3));
                }
                let mut conj = Vec::new();
                for (p, q) in pairs {
                    let (px, qy) = (noun_atom(vocab, *p, x)?, noun_atom(vocab, *q, y)?);
                    // p ↔ q as (p → q) & (q → p)
                    conj.push(Formula::implies(px.clone(), qy.clone()));
                    conj.push(Formula::implies(qy, px));
                }
                Formula::forall(
                    x,
                    Formula::forall(y, Formula::implies(Formula::conj(conj), verb_atom(vocab, *r, x, y)?)),
                )
            }
            Fo2Form::ForallExists { p, q, r, r_positive } => Formula::forall(
                x,
                Formula::implies(
                    signed(vocab, *p, x)?,
                    Formula::exists(
                        y,
                        Formula::And(vec![signed(vocab, *q, y)?, verb_atom(vocab, *r, x, y)?.signed(*r_positive)]),
                    ),
                ),
            ),
            Fo2Form::ForallForall { p, q, r, r_positive } => Formula::forall(
                x,
                Formula::implies(
                    signed(vocab, *p, x)?,
                    Formula::forall(
                        y,
                        Formula::implies(signed(vocab, *q, y)?, verb_atom(vocab, *r, x, y)?.signed(*r_positive)),
                    ),
                ),
            ),
        })
    }

    /// Fragment-A sentences equisatisfiable with the form. Fresh symbols are
    /// appended to `vocab`.
    pub fn lower(&self, vocab: &mut Vocabulary) -> Result<Vec<AbstractSentence>, LogicError> {
        match self {
            Fo2Form::ExistsConj(lits) => {
                let star = SignedNoun::new(vocab.fresh_noun("pstar"), true);
                let mut out = vec![copular(Determiner::Some, star, star)];
                out.extend(lits.iter().map(|l| copular(Determiner::Every, star, *l)));
                Ok(out)
            }
            Fo2Form::ForallDisj(lits) => Ok(lower_disjunction(lits, vocab)),
            Fo2Form::Matching { pairs, r } => {
                if pairs.is_empty() {
                    return Err(LogicError::EmptyForm(3));
                }
                Ok(lower_matching(pairs, *r, vocab))
            }
            Fo2Form::ForallExists { p, q, r, r_positive } => Ok(vec![if *r_positive {
                transitive(Determiner::Every, ObjectDet::Some, *p, *q, *r)
            } else {
                transitive(Determiner::No, ObjectDet::Every, *p, *q, *r)
            }]),
            Fo2Form::ForallForall { p, q, r, r_positive } => Ok(vec![if *r_positive {
                transitive(Determiner::Every, ObjectDet::Every, *p, *q, *r)
            } else {
                transitive(Determiner::No, ObjectDet::Some, *p, *q, *r)
            }]),
        }
    }
}

fn lower_disjunction(lits: &[SignedNoun], vocab: &mut Vocabulary) -> Vec<AbstractSentence> {
    match lits {
        [] => {
            let star = SignedNoun::new(vocab.fresh_noun("pstar"), true);
            vec![copular(Determiner::Every, star, star.neg()), copular(Determiner::Every, star.neg(), star)]
        }
        [a] => vec![copular(Determiner::Every, a.neg(), *a)],
        [a, b] => vec![copular(Determiner::Every, a.neg(), *b)],
        [a, b, c] => vec![rel_copular(a.neg(), b.neg(), *c)],
        _ => {
            // (l₁ ∨ l₂ ∨ t₁), (¬t₁ ∨ l₃ ∨ t₂), …, (¬tₖ ∨ lₙ₋₁ ∨ lₙ)
            let n = lits.len();
            let mut out = Vec::new();
            let mut carry = SignedNoun::new(vocab.fresh_noun("pstar"), true);
            out.push(rel_copular(lits[0].neg(), lits[1].neg(), carry));
            for lit in &lits[2..n - 2] {
                let next = SignedNoun::new(vocab.fresh_noun("pstar"), true);
                out.push(rel_copular(carry, lit.neg(), next));
                carry = next;
            }
            out.push(rel_copular(carry, lits[n - 2].neg(), lits[n - 1]));
            out
        }
    }
}

/// Chain `c₀ … cₙ` of fresh verbs with `cᵢ` holding (up to orientation) of
/// every pair that matches on the first `i` pairs. The anaphor reverses the
/// argument order at each step, so orientations alternate and `cₙ` is
/// reversed relative to `r`.
fn lower_matching(pairs: &[(usize, usize)], r: usize, vocab: &mut Vocabulary) -> Vec<AbstractSentence> {
    let n = pairs.len();
    let chain: Vec<usize> = (0..=n).map(|_| vocab.fresh_verb("rstar")).collect();
    let reversed = |i: usize| (n - i).is_multiple_of(2);
    let signs = [true, false];
    let mut out = Vec::new();
    let p1 = pairs[0].0;
    for a in signs {
        for b in signs {
            out.push(transitive(
                Determiner::Every,
                ObjectDet::Every,
                SignedNoun::new(p1, a),
                SignedNoun::new(p1, b),
                chain[0],
            ));
        }
    }
    for i in 1..=n {
        let (p, q) = pairs[i - 1];
        for sign in signs {
            let (p, q) = (SignedNoun::new(p, sign), SignedNoun::new(q, sign));
            out.push(if reversed(i) {
                anaphoric_every(q, p, chain[i], chain[i - 1])
            } else {
                anaphoric_every(p, q, chain[i], chain[i - 1])
            });
        }
    }
    for a in signs {
        for b in signs {
            out.push(anaphoric_every(SignedNoun::new(p1, a), SignedNoun::new(p1, b), r, chain[n]));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::realize;

    #[test]
    fn form_one_sentences() {
        let mut v = Vocabulary::default_english();
        let p1 = v.noun_index("artist").unwrap();
        let p2 = v.noun_index("beekeeper").unwrap();
        let form = Fo2Form::ExistsConj(vec![SignedNoun::new(p1, true), SignedNoun::new(p2, false)]);
        let text: Vec<String> = form.lower(&mut v).unwrap().iter().map(|s| realize(s, &v).unwrap()).collect();
        assert_eq!(text, ["Some pstar0 is a pstar0", "Every pstar0 is an artist", "Every pstar0 is a non-beekeeper"]);
    }

    #[test]
    fn form_five_is_direct() {
        let mut v = Vocabulary::default_english();
        let p = v.noun_index("artist").unwrap();
        let q = v.noun_index("beekeeper").unwrap();
        let r = v.verb_by_base("admire").unwrap();
        let form =
            Fo2Form::ForallForall { p: SignedNoun::new(p, true), q: SignedNoun::new(q, true), r, r_positive: false };
        let s = form.lower(&mut v).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(realize(&s[0], &v).unwrap(), "No artist admires any beekeeper");
        assert_eq!(form.formula(&v).unwrap().render(), "all x. (artist(x) -> all y. (beekeeper(y) -> ~admire(x,y)))");
    }

    #[test]
    fn form_three_shape() {
        let mut v = Vocabulary::default_english();
        let form = Fo2Form::Matching { pairs: vec![(0, 1)], r: 0 };
        let s = form.lower(&mut v).unwrap();
        assert_eq!(s.len(), 4 + 2 + 4);
        assert!(s.iter().all(|x| x.is_well_formed()));
        assert!(Fo2Form::Matching { pairs: vec![], r: 0 }.lower(&mut v).is_err());
    }

    #[test]
    fn long_disjunction_chain() {
        let mut v = Vocabulary::default_english();
        let lits: Vec<SignedNoun> = (0..6).map(|i| SignedNoun::new(i, i % 2 == 0)).collect();
        let s = Fo2Form::ForallDisj(lits).lower(&mut v).unwrap();
        assert_eq!(s.len(), 4);
        assert!(s.iter().all(|x| x.template.form == Form::RelCopular));
    }
}
