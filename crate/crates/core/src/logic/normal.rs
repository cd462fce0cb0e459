//! Regrouping of fragment formulas into solver constraints.
//!
//! Every rewrite is a classical equivalence (negation normal form, CNF with
//! quantified subformulas treated as opaque atoms, distribution of `∀x` over
//! clauses), so the resulting [`NormalTheory`] has exactly the models of the
//! input set. No fresh predicates are introduced.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::formula::{Formula, Var};
use super::LogicError;

/// Predicate names with stable indices, in order of first occurrence.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub unary: Vec<String>,
    pub binary: Vec<String>,
}

impl Signature {
    pub fn from_formulas(formulas: &[Formula]) -> Signature {
        let mut sig = Signature::default();
        for f in formulas {
            f.predicates(&mut sig.unary, &mut sig.binary);
        }
        sig
    }

    /// Adds the predicates of `formulas` that are not yet present.
    pub fn extend(&mut self, formulas: &[Formula]) {
        for f in formulas {
            f.predicates(&mut self.unary, &mut self.binary);
        }
    }

    pub fn unary_index(&self, name: &str) -> Option<usize> {
        self.unary.iter().position(|n| n == name)
    }

    pub fn binary_index(&self, name: &str) -> Option<usize> {
        self.binary.iter().position(|n| n == name)
    }

    /// A name used both as a unary and a binary predicate.
    pub fn arity_clash(&self) -> Option<&str> {
        self.unary.iter().find(|u| self.binary.contains(u)).map(String::as_str)
    }
}

/// Atom over the two distinguished elements `x` (the constrained element)
/// and `y` (its partner). Payload is the signature index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Atom {
    X(usize),
    Y(usize),
    XY(usize),
    YX(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Lit {
    pub atom: Atom,
    pub positive: bool,
}

impl Lit {
    pub fn new(atom: Atom, positive: bool) -> Lit {
        Lit { atom, positive }
    }

    pub fn negated(self) -> Lit {
        Lit { atom: self.atom, positive: !self.positive }
    }

    /// Same literal seen from the partner: `x` and `y` exchange roles.
    pub fn swapped(self) -> Lit {
        let atom = match self.atom {
            Atom::X(p) => Atom::Y(p),
            Atom::Y(p) => Atom::X(p),
            Atom::XY(r) => Atom::YX(r),
            Atom::YX(r) => Atom::XY(r),
        };
        Lit { atom, positive: self.positive }
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("~")?;
        }
        match self.atom {
            Atom::X(p) => write!(f, "u{p}(x)"),
            Atom::Y(p) => write!(f, "u{p}(y)"),
            Atom::XY(r) => write!(f, "b{r}(x,y)"),
            Atom::YX(r) => write!(f, "b{r}(y,x)"),
        }
    }
}

/// `∀x (l₁ ∨ … ∨ lₖ)` over unary literals on `x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnaryClause {
    pub lits: Vec<Lit>,
    pub source: usize,
}

/// `∀x ∀y (l₁ ∨ … ∨ lₖ)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuardClause {
    pub lits: Vec<Lit>,
    pub source: usize,
}

/// `∀x (guard(x) → ∃y body(x,y))`; the guard is a conjunction of `x`
/// literals, the body a conjunction of `y` and binary literals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRequirement {
    pub guard: Vec<Lit>,
    pub body: Vec<Lit>,
    pub source: usize,
}

/// `∃x (lits(x) ∧ ∀y obligations(x,y) ∧ ∃y witness₁(x,y) ∧ …)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Realizer {
    pub lits: Vec<Lit>,
    /// Clauses that must hold for the realizing element against every `y`.
    pub obligations: Vec<Vec<Lit>>,
    /// Conjunctions, each needing its own partner.
    pub witnesses: Vec<Vec<Lit>>,
    pub source: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalTheory {
    pub signature: Signature,
    pub unary_clauses: Vec<UnaryClause>,
    pub guard_clauses: Vec<GuardClause>,
    pub witness_requirements: Vec<WitnessRequirement>,
    pub realizers: Vec<Realizer>,
}

impl NormalTheory {
    /// No binary constraint anywhere.
    pub fn is_unary(&self) -> bool {
        self.guard_clauses.is_empty()
            && self.witness_requirements.is_empty()
            && self.realizers.iter().all(|r| r.obligations.is_empty() && r.witnesses.is_empty())
    }

    pub fn max_unary_width(&self) -> usize {
        self.unary_clauses.iter().map(|c| c.lits.len()).max().unwrap_or(0)
    }
}

/// Negation normal form with atoms resolved against a signature.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Nnf {
    Lit(NAtom, bool),
    And(Vec<Nnf>),
    Or(Vec<Nnf>),
    All(Var, Box<Nnf>),
    Ex(Var, Box<Nnf>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum NAtom {
    Unary(usize, Var),
    Binary(usize, Var, Var),
}

fn nnf(f: &Formula, positive: bool, sig: &Signature) -> Result<Nnf, LogicError> {
    Ok(match f {
        Formula::Unary(n, v) => {
            let i = sig.unary_index(n).ok_or_else(|| LogicError::UnknownPredicate(n.clone()))?;
            Nnf::Lit(NAtom::Unary(i, *v), positive)
        }
        Formula::Binary(n, a, b) => {
            let i = sig.binary_index(n).ok_or_else(|| LogicError::UnknownPredicate(n.clone()))?;
            Nnf::Lit(NAtom::Binary(i, *a, *b), positive)
        }
        Formula::Not(g) => nnf(g, !positive, sig)?,
        Formula::And(gs) | Formula::Or(gs) => {
            let items = gs.iter().map(|g| nnf(g, positive, sig)).collect::<Result<Vec<_>, _>>()?;
            if matches!(f, Formula::And(_)) == positive {
                Nnf::And(items)
            } else {
                Nnf::Or(items)
            }
        }
        Formula::Implies(a, b) => {
            let items = vec![nnf(a, !positive, sig)?, nnf(b, positive, sig)?];
            if positive {
                Nnf::Or(items)
            } else {
                Nnf::And(items)
            }
        }
        Formula::Forall(v, g) | Formula::Exists(v, g) => {
            let body = Box::new(nnf(g, positive, sig)?);
            if matches!(f, Formula::Forall(..)) == positive {
                Nnf::All(*v, body)
            } else {
                Nnf::Ex(*v, body)
            }
        }
    })
}

impl Nnf {
    fn swap_vars(self) -> Nnf {
        match self {
            Nnf::Lit(NAtom::Unary(p, v), s) => Nnf::Lit(NAtom::Unary(p, v.other()), s),
            Nnf::Lit(NAtom::Binary(p, a, b), s) => Nnf::Lit(NAtom::Binary(p, a.other(), b.other()), s),
            Nnf::And(gs) => Nnf::And(gs.into_iter().map(Nnf::swap_vars).collect()),
            Nnf::Or(gs) => Nnf::Or(gs.into_iter().map(Nnf::swap_vars).collect()),
            Nnf::All(v, g) => Nnf::All(v.other(), Box::new(g.swap_vars())),
            Nnf::Ex(v, g) => Nnf::Ex(v.other(), Box::new(g.swap_vars())),
        }
    }
}

/// CNF item: a literal or an opaque quantified subformula.
#[derive(Clone, Debug)]
enum Item {
    Lit(NAtom, bool),
    Quant(Nnf),
}

const CNF_LIMIT: usize = 4096;

fn cnf(f: &Nnf) -> Result<Vec<Vec<Item>>, LogicError> {
    Ok(match f {
        Nnf::Lit(a, s) => vec![vec![Item::Lit(*a, *s)]],
        Nnf::All(..) | Nnf::Ex(..) => vec![vec![Item::Quant(f.clone())]],
        Nnf::And(gs) => {
            let mut out = Vec::new();
            for g in gs {
                out.extend(cnf(g)?);
            }
            out
        }
        Nnf::Or(gs) => {
            let mut acc: Vec<Vec<Item>> = vec![Vec::new()];
            for g in gs {
                let part = cnf(g)?;
                let mut next = Vec::with_capacity(acc.len() * part.len());
                for a in &acc {
                    for b in &part {
                        let mut c = a.clone();
                        c.extend(b.iter().cloned());
                        next.push(c);
                    }
                }
                if next.len() > CNF_LIMIT {
                    return Err(LogicError::UnrecognizedShape("clause expansion too large".into()));
                }
                acc = next;
            }
            acc
        }
    })
}

fn shape(msg: &str) -> LogicError {
    LogicError::UnrecognizedShape(msg.to_string())
}

/// Literal inside a `y` scope nested under `x`.
fn inner_lit(a: NAtom, positive: bool) -> Result<Lit, LogicError> {
    let atom = match a {
        NAtom::Unary(p, Var::X) => Atom::X(p),
        NAtom::Unary(p, Var::Y) => Atom::Y(p),
        NAtom::Binary(r, Var::X, Var::Y) => Atom::XY(r),
        NAtom::Binary(r, Var::Y, Var::X) => Atom::YX(r),
        NAtom::Binary(..) => return Err(shape("reflexive binary atom")),
    };
    Ok(Lit::new(atom, positive))
}

fn outer_lit(a: NAtom, positive: bool) -> Result<Lit, LogicError> {
    match a {
        NAtom::Unary(p, Var::X) => Ok(Lit::new(Atom::X(p), positive)),
        _ => Err(shape("atom outside the scope of its variable")),
    }
}

/// Clauses of the body of a `∀y`, all items literals.
fn inner_clauses(body: &Nnf) -> Result<Vec<Vec<Lit>>, LogicError> {
    cnf(body)?
        .into_iter()
        .map(|c| {
            c.into_iter()
                .map(|i| match i {
                    Item::Lit(a, s) => inner_lit(a, s),
                    Item::Quant(_) => Err(shape("quantifier nesting deeper than two")),
                })
                .collect()
        })
        .collect()
}

/// Literals of the body of an `∃y`: a conjunction without `x`-only literals.
fn inner_conjunction(body: &Nnf) -> Result<Vec<Lit>, LogicError> {
    let mut out = Vec::new();
    for c in inner_clauses(body)? {
        if c.len() != 1 {
            return Err(shape("existential body is not a conjunction of literals"));
        }
        if matches!(c[0].atom, Atom::X(_)) {
            return Err(shape("existential body mentions only the outer variable"));
        }
        out.push(c[0]);
    }
    Ok(out)
}

fn dedup(mut lits: Vec<Lit>) -> Vec<Lit> {
    let mut seen = Vec::with_capacity(lits.len());
    lits.retain(|l| {
        if seen.contains(l) {
            false
        } else {
            seen.push(*l);
            true
        }
    });
    lits
}

/// Normal form of a list of closed fragment formulas. The signature is
/// collected from the formulas in order of first occurrence.
pub fn normalize(formulas: &[Formula]) -> Result<NormalTheory, LogicError> {
    normalize_with(formulas, Signature::from_formulas(formulas))
}

/// As [`normalize`], against a given signature (which must cover all
/// predicates of the formulas).
pub fn normalize_with(formulas: &[Formula], signature: Signature) -> Result<NormalTheory, LogicError> {
    if let Some(name) = signature.arity_clash() {
        return Err(LogicError::ArityClash(name.to_string()));
    }
    let mut theory = NormalTheory { signature, ..Default::default() };
    for (source, f) in formulas.iter().enumerate() {
        if !f.is_closed() {
            return Err(LogicError::FreeVariable(f.render()));
        }
        let n = nnf(f, true, &theory.signature)?;
        add_sentence(&mut theory, n, source)?;
    }
    Ok(theory)
}

fn add_sentence(theory: &mut NormalTheory, f: Nnf, source: usize) -> Result<(), LogicError> {
    match f {
        Nnf::And(items) => items.into_iter().try_for_each(|g| add_sentence(theory, g, source)),
        Nnf::All(Var::Y, _) | Nnf::Ex(Var::Y, _) => add_sentence(theory, f.swap_vars(), source),
        Nnf::All(Var::X, body) => add_universal(theory, &body, source),
        Nnf::Ex(Var::X, body) => add_existential(theory, &body, source),
        Nnf::Lit(..) | Nnf::Or(_) => Err(shape("sentence is not rooted in a quantifier")),
    }
}

fn add_universal(theory: &mut NormalTheory, body: &Nnf, source: usize) -> Result<(), LogicError> {
    for clause in cnf(body)? {
        let mut xlits = Vec::new();
        let mut quant = None;
        for item in clause {
            match item {
                Item::Lit(a, s) => xlits.push(outer_lit(a, s)?),
                Item::Quant(q) => {
                    if quant.replace(q).is_some() {
                        return Err(shape("two quantified subformulas in one clause"));
                    }
                }
            }
        }
        match quant {
            None => theory.unary_clauses.push(UnaryClause { lits: dedup(xlits), source }),
            Some(Nnf::All(Var::Y, inner)) => {
                for c in inner_clauses(&inner)? {
                    let mut lits = xlits.clone();
                    lits.extend(c);
                    theory.guard_clauses.push(GuardClause { lits: dedup(lits), source });
                }
            }
            Some(Nnf::Ex(Var::Y, inner)) => {
                let body = inner_conjunction(&inner)?;
                let guard = xlits.iter().map(|l| l.negated()).collect();
                theory.witness_requirements.push(WitnessRequirement { guard: dedup(guard), body: dedup(body), source });
            }
            Some(_) => return Err(shape("nested quantifier rebinds x")),
        }
    }
    Ok(())
}

fn add_existential(theory: &mut NormalTheory, body: &Nnf, source: usize) -> Result<(), LogicError> {
    let mut realizer = Realizer { lits: Vec::new(), obligations: Vec::new(), witnesses: Vec::new(), source };
    for clause in cnf(body)? {
        if clause.len() != 1 {
            return Err(shape("existential sentence with a disjunctive body"));
        }
        match clause.into_iter().next().expect("one item") {
            Item::Lit(a, s) => realizer.lits.push(outer_lit(a, s)?),
            Item::Quant(Nnf::All(Var::Y, inner)) => realizer.obligations.extend(inner_clauses(&inner)?),
            Item::Quant(Nnf::Ex(Var::Y, inner)) => realizer.witnesses.push(inner_conjunction(&inner)?),
            Item::Quant(_) => return Err(shape("nested quantifier rebinds x")),
        }
    }
    realizer.lits = dedup(realizer.lits);
    theory.realizers.push(realizer);
    Ok(())
}

/// Human-readable listing of a theory, one constraint per line.
pub fn describe(theory: &NormalTheory) -> String {
    let sig = &theory.signature;
    let name = |l: &Lit| {
        let neg = if l.positive { "" } else { "~" };
        match l.atom {
            Atom::X(p) => format!("{neg}{}(x)", sig.unary[p]),
            Atom::Y(p) => format!("{neg}{}(y)", sig.unary[p]),
            Atom::XY(r) => format!("{neg}{}(x,y)", sig.binary[r]),
            Atom::YX(r) => format!("{neg}{}(y,x)", sig.binary[r]),
        }
    };
    let join = |ls: &[Lit], sep: &str| ls.iter().map(name).collect::<Vec<_>>().join(sep);
    let mut out = String::new();
    for c in &theory.unary_clauses {
        out.push_str(&format!("unary   [{}] {}\n", c.source, join(&c.lits, " | ")));
    }
    for c in &theory.guard_clauses {
        out.push_str(&format!("guard   [{}] {}\n", c.source, join(&c.lits, " | ")));
    }
    for w in &theory.witness_requirements {
        out.push_str(&format!("witness [{}] {} => {}\n", w.source, join(&w.guard, " & "), join(&w.body, " & ")));
    }
    for r in &theory.realizers {
        out.push_str(&format!("exists  [{}] {}", r.source, join(&r.lits, " & ")));
        for o in &r.obligations {
            out.push_str(&format!(" ; all y. {}", join(o, " | ")));
        }
        for w in &r.witnesses {
            out.push_str(&format!(" ; exists y. {}", join(w, " & ")));
        }
        out.push('\n');
    }
    out
}

/// Index maps for renaming one theory's predicates into another signature.
pub fn signature_map(from: &Signature, to: &Signature) -> Option<(Vec<usize>, Vec<usize>)> {
    let to_u: HashMap<&str, usize> = to.unary.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let to_b: HashMap<&str, usize> = to.binary.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let u = from.unary.iter().map(|n| to_u.get(n.as_str()).copied()).collect::<Option<Vec<_>>>()?;
    let b = from.binary.iter().map(|n| to_b.get(n.as_str()).copied()).collect::<Option<Vec<_>>>()?;
    Some((u, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_fol;

    fn norm(texts: &[&str]) -> NormalTheory {
        let fs: Vec<Formula> = texts.iter().map(|t| parse_fol(t).unwrap()).collect();
        normalize(&fs).unwrap()
    }

    #[test]
    fn no_any_is_one_guard_clause() {
        let t = norm(&["all x. (p(x) -> all y. (q(y) -> ~r(x,y)))"]);
        assert_eq!(t.guard_clauses.len(), 1);
        assert_eq!(
            t.guard_clauses[0].lits,
            vec![Lit::new(Atom::X(0), false), Lit::new(Atom::Y(1), false), Lit::new(Atom::XY(0), false)]
        );
        assert!(t.unary_clauses.is_empty() && t.witness_requirements.is_empty() && t.realizers.is_empty());
    }

    #[test]
    fn relative_every_is_witness_requirement() {
        // Every o who r's every p is a q
        let t = norm(&["all x. ((o(x) & all y. (p(y) -> r(x,y))) -> q(x))"]);
        assert_eq!(t.witness_requirements.len(), 1);
        let w = &t.witness_requirements[0];
        assert_eq!(w.guard, vec![Lit::new(Atom::X(0), true), Lit::new(Atom::X(2), false)]);
        assert_eq!(w.body, vec![Lit::new(Atom::Y(1), true), Lit::new(Atom::XY(0), false)]);
    }

    #[test]
    fn relative_some_is_guard_clause() {
        let t = norm(&["all x. ((o(x) & exists y. (p(y) & r(x,y))) -> q(x))"]);
        assert_eq!(t.guard_clauses.len(), 1);
        assert_eq!(t.guard_clauses[0].lits.len(), 4);
    }

    #[test]
    fn scholar_musician_unsat_set() {
        let t = norm(&[
            "all x. (scholar(x) -> exists y. (musician(y) & love(x,y)))",
            "all x. (musician(x) -> artist(x))",
            "exists x. (scholar(x) & all y. (musician(y) -> ~love(x,y)))",
        ]);
        assert_eq!(t.witness_requirements.len(), 1);
        assert_eq!(t.unary_clauses.len(), 1);
        assert_eq!(t.realizers.len(), 1);
        assert_eq!(t.realizers[0].obligations.len(), 1);
        assert!(describe(&t).contains("all y. ~musician(y) | ~love(x,y)"));
    }

    #[test]
    fn outer_y_is_renamed() {
        let t = norm(&["all y. (p(y) -> q(y))"]);
        assert_eq!(t.unary_clauses[0].lits, vec![Lit::new(Atom::X(0), false), Lit::new(Atom::X(1), true)]);
    }

    #[test]
    fn rejects_non_fragment_shapes() {
        for text in [
            "all x. r(x,x)",
            "(exists x. p(x) | exists x. q(x))",
            "all x. exists y. all x. p(x)",
            "exists x. (p(x) | q(x))",
            "all x. (exists y. r(x,y) | all y. s(x,y))",
        ] {
            let f = parse_fol(text).unwrap();
            assert!(matches!(normalize(&[f]), Err(LogicError::UnrecognizedShape(_))), "{text}");
        }
        assert!(matches!(normalize(&[parse_fol("p(x)").unwrap()]), Err(LogicError::FreeVariable(_))));
        assert!(matches!(
            normalize(&[parse_fol("all x. (p(x) -> exists y. p(x,y))").unwrap()]),
            Err(LogicError::ArityClash(_))
        ));
    }
}
