//! Compositional semantics of the fragment templates.
//!
//! The subject scopes over the object, `No` is a universal with a negated
//! matrix, relative clauses are conjoined into the restrictor, and the
//! anaphor `him` in `... who s's him` denotes `s(y,x)`.

use crate::grammar::{AbstractSentence, Determiner, Form, ObjectDet, Slot, Vocabulary};

use super::formula::{Formula, Var};
use super::LogicError;

fn noun(s: &AbstractSentence, slot: Slot, vocab: &Vocabulary, var: Var) -> Result<Formula, LogicError> {
    let i = s.slot(slot).ok_or(LogicError::UnresolvableSlot(slot))?;
    let n = vocab.noun(i).ok_or(LogicError::UnresolvableSlot(slot))?;
    Ok(Formula::unary(&n.surface, var))
}

fn verb(s: &AbstractSentence, slot: Slot, vocab: &Vocabulary, a: Var, b: Var) -> Result<Formula, LogicError> {
    let i = s.slot(slot).ok_or(LogicError::UnresolvableSlot(slot))?;
    let v = vocab.verb(i).ok_or(LogicError::UnresolvableSlot(slot))?;
    Ok(Formula::binary(&v.base, a, b))
}

/// `Det_obj restrictor (not) relation` over `y`, with `negated` flipping the
/// whole quantified phrase.
fn object_phrase(det: ObjectDet, negated: bool, restrictor: Vec<Formula>, relation: Formula) -> Formula {
    // (existential?, relation positive?)
    let (exists, positive) = match (det, negated) {
        (ObjectDet::Some, false) => (true, true),
        (ObjectDet::Some, true) => (false, false),
        (ObjectDet::Every, false) => (false, true),
        (ObjectDet::Every, true) => (true, false),
        (ObjectDet::No, false) => (false, false),
        (ObjectDet::No, true) => (true, true),
    };
    let rel = relation.signed(positive);
    if exists {
        let mut items = restrictor;
        items.push(rel);
        Formula::exists(Var::Y, Formula::conj(items))
    } else {
        Formula::forall(Var::Y, Formula::implies(Formula::conj(restrictor), rel))
    }
}

/// `Det restrictor predicate` over `x`.
fn subject_phrase(det: Determiner, restrictor: Vec<Formula>, predicate: Formula) -> Formula {
    match det {
        Determiner::Every => Formula::forall(Var::X, Formula::implies(Formula::conj(restrictor), predicate)),
        Determiner::No => Formula::forall(Var::X, Formula::implies(Formula::conj(restrictor), predicate.negate())),
        Determiner::Some => {
            let mut items = restrictor;
            items.push(predicate);
            Formula::exists(Var::X, Formula::conj(items))
        }
    }
}

/// The formula expressing `s`.
pub fn translate(s: &AbstractSentence, vocab: &Vocabulary) -> Result<Formula, LogicError> {
    let t = &s.template;
    let pol = t.polarity;
    let x = Var::X;
    let y = Var::Y;
    let object = || t.object.ok_or(LogicError::MalformedTemplate);
    // In verb main clauses the negation of a `No` subject is pushed onto the
    // object phrase, keeping formulas in the flat template shapes.
    let main_negated = pol.verb_not != (t.subject == Determiner::No);
    let main_subject = if t.subject == Determiner::No { Determiner::Every } else { t.subject };
    let formula = match t.form {
        Form::Copular => {
            let subj = noun(s, Slot::P, vocab, x)?.signed(!pol.subject_non);
            let pred = noun(s, Slot::Q, vocab, x)?.signed(!pol.predicate_non).signed(!pol.copula_not);
            subject_phrase(t.subject, vec![subj], pred)
        }
        Form::RelCopular => {
            let subj = noun(s, Slot::O, vocab, x)?.signed(!pol.subject_non);
            let rel = noun(s, Slot::P, vocab, x)?.signed(!pol.relative_not);
            let pred = noun(s, Slot::Q, vocab, x)?.signed(!pol.predicate_non).signed(!pol.copula_not);
            subject_phrase(t.subject, vec![subj, rel], pred)
        }
        Form::Transitive => {
            let subj = noun(s, Slot::P, vocab, x)?.signed(!pol.subject_non);
            let obj = noun(s, Slot::Q, vocab, y)?.signed(!pol.object_non);
            let vp = object_phrase(object()?, main_negated, vec![obj], verb(s, Slot::R, vocab, x, y)?);
            subject_phrase(main_subject, vec![subj], vp)
        }
        Form::RelTransitive => {
            let subj = noun(s, Slot::O, vocab, x)?.signed(!pol.subject_non);
            let obj = noun(s, Slot::P, vocab, y)?.signed(!pol.object_non);
            let rc = object_phrase(object()?, pol.relative_not, vec![obj], verb(s, Slot::R, vocab, x, y)?);
            let pred = noun(s, Slot::Q, vocab, x)?.signed(!pol.predicate_non).signed(!pol.copula_not);
            subject_phrase(t.subject, vec![subj, rc], pred)
        }
        Form::Anaphoric => {
            let subj = noun(s, Slot::O, vocab, x)?.signed(!pol.subject_non);
            let obj = noun(s, Slot::P, vocab, y)?.signed(!pol.object_non);
            let anaphor = verb(s, Slot::S, vocab, y, x)?.signed(!pol.anaphor_not);
            let vp = object_phrase(object()?, main_negated, vec![obj, anaphor], verb(s, Slot::R, vocab, x, y)?);
            subject_phrase(main_subject, vec![subj], vp)
        }
    };
    Ok(formula)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{fragment_templates, parse, FragmentTag, Polarity, Template};

    fn tr(text: &str, f: FragmentTag) -> String {
        let vocab = Vocabulary::default_english();
        let s = parse(text, f, &vocab).unwrap();
        translate(&s, &vocab).unwrap().render()
    }

    #[test]
    fn copular() {
        assert_eq!(tr("Every non-artist is a beekeeper", FragmentTag::S), "all x. (~artist(x) -> beekeeper(x))");
        assert_eq!(tr("No artist is a non-beekeeper", FragmentTag::S), "all x. (artist(x) -> beekeeper(x))");
        assert_eq!(tr("Some artist is not a beekeeper", FragmentTag::S), "exists x. (artist(x) & ~beekeeper(x))");
    }

    #[test]
    fn scholar_musician_sentences() {
        assert_eq!(
            tr("Every scholar loves some musician", FragmentTag::V),
            "all x. (scholar(x) -> exists y. (musician(y) & love(x,y)))"
        );
        assert_eq!(
            tr("Some scholar does not love any musician", FragmentTag::V),
            "exists x. (scholar(x) & all y. (musician(y) -> ~love(x,y)))"
        );
        assert_eq!(
            tr("No scholar loves every musician", FragmentTag::V),
            "all x. (scholar(x) -> exists y. (musician(y) & ~love(x,y)))"
        );
    }

    #[test]
    fn relative_clauses() {
        assert_eq!(
            tr("Every carpenter who admires some writer is an electrician", FragmentTag::Z),
            "all x. ((carpenter(x) & exists y. (writer(y) & admire(x,y))) -> electrician(x))"
        );
        assert_eq!(
            tr("No carpenter who admires any writer is an electrician", FragmentTag::Z),
            "all x. ((carpenter(x) & exists y. (writer(y) & admire(x,y))) -> ~electrician(x))"
        );
        assert_eq!(
            tr("Every artist who is not a musician is a writer", FragmentTag::W),
            "all x. ((artist(x) & ~musician(x)) -> writer(x))"
        );
    }

    #[test]
    fn anaphora() {
        assert_eq!(
            tr("Some artist hates no beekeeper who admires him", FragmentTag::A),
            "exists x. (artist(x) & all y. ((beekeeper(y) & admire(y,x)) -> ~hate(x,y)))"
        );
        assert_eq!(
            tr("Every artist hates some beekeeper who does not admire him", FragmentTag::A),
            "all x. (artist(x) -> exists y. (beekeeper(y) & ~admire(y,x) & hate(x,y)))"
        );
    }

    #[test]
    fn every_template_translates_closed_two_variable() {
        let vocab = Vocabulary::default_english();
        for t in fragment_templates(FragmentTag::A) {
            let mut s = AbstractSentence::new(FragmentTag::A, *t);
            for slot in t.form.slots().iter() {
                s.set_slot(slot, if slot.is_noun() { slot as usize } else { slot as usize - 3 });
            }
            let f = translate(&s, &vocab).unwrap();
            assert!(f.is_closed(), "{f}");
            assert!(f.variables().len() <= 2);
        }
        let bad = AbstractSentence::new(
            FragmentTag::S,
            Template { form: Form::Copular, subject: Determiner::Every, object: None, polarity: Polarity::default() },
        );
        assert!(translate(&bad, &vocab).is_err());
    }
}
