//! First-order side of the fragments: formulas, translation, normal form,
//! SMT-LIB export and the FO² lowering constructions.

mod formula;
mod lowering;
mod normal;
mod smtlib;
mod translate;

pub use formula::{parse_fol, render_fol, Formula, Quantifier, Var};
pub use lowering::{Fo2Form, SignedNoun};
pub use normal::{
    describe, normalize, normalize_with, signature_map, Atom, GuardClause, Lit, NormalTheory, Realizer, Signature,
    UnaryClause, WitnessRequirement,
};
pub use smtlib::{formula_to_smtlib, to_smtlib};
pub use translate::translate;

use thiserror::Error;

use crate::grammar::Slot;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogicError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("slot {0:?} is unbound or out of range")]
    UnresolvableSlot(Slot),
    #[error("template lacks a determiner its form requires")]
    MalformedTemplate,
    #[error("unrecognized formula shape: {0}")]
    UnrecognizedShape(String),
    #[error("formula has a free variable: {0}")]
    FreeVariable(String),
    #[error("predicate {0:?} is not in the signature")]
    UnknownPredicate(String),
    #[error("predicate {0:?} is used with two arities")]
    ArityClash(String),
    #[error("form ({0}) needs at least one conjunct")]
    EmptyForm(usize),
}
