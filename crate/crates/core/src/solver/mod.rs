//! Satisfiability for the fragments: native decision procedures with model
//! certificates, a DPLL engine, a grounding oracle and a model checker.

mod cdcl;
mod cnf;
mod ground;
mod model;
mod typed;
mod unary;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cnf::{cnf_sat, cnf_sat_with, Branching, CnfFormula, CnfOptions, CnfResult, CnfStats, Engine};
pub use ground::{ground_at, ground_check, ground_check_with, GroundOptions, GroundResult};
pub use model::{model_check, theory_holds, Demand, ModelCertificate, Structure, WitnessEdge};

use crate::grammar::{AbstractSentence, FragmentTag, Vocabulary};
use crate::logic::{normalize, translate, Formula, LogicError, NormalTheory};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("{0}")]
    WrongFragment(String),
    #[error("sentence of fragment {found} in a set declared as fragment {expected}")]
    MixedFragment { expected: FragmentTag, found: FragmentTag },
    #[error("predicate {0:?} does not match the structure's signature")]
    SignatureMismatch(String),
    #[error("domain must have at least one element")]
    EmptyDomain,
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    #[error("solver budget exhausted")]
    Timeout,
    #[error("internal solver error: {0}")]
    Internal(String),
    #[error(transparent)]
    Logic(#[from] LogicError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Search nodes before giving up with a timeout.
    pub node_budget: u64,
    /// Wall-clock budget per instance; `None` disables it (results are then
    /// fully reproducible).
    pub wall_budget: Option<Duration>,
    #[serde(skip)]
    pub cnf: CnfOptions,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { node_budget: 10_000_000, wall_budget: Some(Duration::from_secs(30)), cnf: CnfOptions::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    TwoSat,
    RealizerDpll,
    TypeSearch,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub strategy: Strategy,
    pub nodes: u64,
    pub wall: Duration,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Sat(Box<ModelCertificate>),
    Unsat,
    Timeout,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub outcome: Outcome,
    pub stats: SolveStats,
}

impl Verdict {
    pub fn is_sat(&self) -> bool {
        matches!(self.outcome, Outcome::Sat(_))
    }

    pub fn is_timeout(&self) -> bool {
        matches!(self.outcome, Outcome::Timeout)
    }

    pub fn certificate(&self) -> Option<&ModelCertificate> {
        match &self.outcome {
            Outcome::Sat(c) => Some(c),
            _ => None,
        }
    }

    /// `Some(true)` for sat, `Some(false)` for unsat, `None` on timeout.
    pub fn label(&self) -> Option<bool> {
        match self.outcome {
            Outcome::Sat(_) => Some(true),
            Outcome::Unsat => Some(false),
            Outcome::Timeout => None,
        }
    }
}

fn finish(strategy: Strategy, nodes: u64, start: Instant, outcome: Outcome) -> Verdict {
    Verdict { outcome, stats: SolveStats { strategy, nodes, wall: start.elapsed() } }
}

fn from_option(c: Option<ModelCertificate>) -> Outcome {
    match c {
        Some(c) => Outcome::Sat(Box::new(c)),
        None => Outcome::Unsat,
    }
}

/// Fragment S by implication-graph 2-SAT.
pub fn solve_s(theory: &NormalTheory) -> Result<Verdict, SolverError> {
    let start = Instant::now();
    let c = unary::decide_s(theory)?;
    Ok(finish(Strategy::TwoSat, 1 + theory.realizers.len() as u64, start, from_option(c)))
}

/// Fragment W by one DPLL call per realizer.
pub fn solve_w(theory: &NormalTheory, options: &SolveOptions) -> Result<Verdict, SolverError> {
    let start = Instant::now();
    let cnf = CnfOptions { decision_budget: options.cnf.decision_budget.or(Some(options.node_budget)), ..options.cnf };
    let outcome = match unary::decide_w(theory, &cnf) {
        Ok(c) => from_option(c),
        Err(SolverError::Timeout) => Outcome::Timeout,
        Err(e) => return Err(e),
    };
    Ok(finish(Strategy::RealizerDpll, theory.realizers.len().max(1) as u64, start, outcome))
}

/// Fragments V, Z and A by type-set certificate search.
pub fn solve_typed(theory: &NormalTheory, options: &SolveOptions) -> Result<Verdict, SolverError> {
    let start = Instant::now();
    let budget = typed::Budget { nodes: options.node_budget, deadline: options.wall_budget.map(|d| start + d) };
    let (search, nodes) = typed::search(theory, budget)?;
    let outcome = match search {
        typed::Search::Found(c) => Outcome::Sat(Box::new(c)),
        typed::Search::Unsat => Outcome::Unsat,
        typed::Search::Timeout => Outcome::Timeout,
    };
    Ok(finish(Strategy::TypeSearch, nodes, start, outcome))
}

/// Dispatches on the fragment: S to 2-SAT, W to per-realizer DPLL, V/Z/A
/// to the certificate search.
pub fn solve_theory(
    fragment: FragmentTag,
    theory: &NormalTheory,
    options: &SolveOptions,
) -> Result<Verdict, SolverError> {
    match fragment {
        FragmentTag::S => solve_s(theory),
        FragmentTag::W => solve_w(theory, options),
        FragmentTag::V | FragmentTag::Z | FragmentTag::A => solve_typed(theory, options),
    }
}

pub fn solve(fragment: FragmentTag, formulas: &[Formula], options: &SolveOptions) -> Result<Verdict, SolverError> {
    let theory = normalize(formulas)?;
    solve_theory(fragment, &theory, options)
}

/// Translates and solves sentences that all belong to `fragment`.
pub fn solve_sentences(
    fragment: FragmentTag,
    sentences: &[AbstractSentence],
    vocab: &Vocabulary,
    options: &SolveOptions,
) -> Result<Verdict, SolverError> {
    let formulas = sentences
        .iter()
        .map(|s| {
            if s.fragment != fragment || s.template.fragment() > fragment {
                return Err(SolverError::MixedFragment {
                    expected: fragment,
                    found: s.fragment.max(s.template.fragment()),
                });
            }
            Ok(translate(s, vocab)?)
        })
        .collect::<Result<Vec<_>, SolverError>>()?;
    solve(fragment, &formulas, options)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_fol, Signature};

    fn parse_all(texts: &[&str]) -> Vec<Formula> {
        texts.iter().map(|t| parse_fol(t).unwrap()).collect()
    }

    #[test]
    fn scholar_musician_unsat() {
        let f = parse_all(&[
            "all x. (scholar(x) -> exists y. (musician(y) & love(x,y)))",
            "all x. (musician(x) -> artist(x))",
            "exists x. (scholar(x) & all y. (musician(y) -> ~love(x,y)))",
        ]);
        let v = solve(FragmentTag::V, &f, &SolveOptions::default()).unwrap();
        assert_eq!(v.outcome, Outcome::Unsat);
    }

    #[test]
    fn scholar_musician_sat() {
        let f = parse_all(&[
            "exists x. (scholar(x) & scholar(x))",
            "all x. (musician(x) -> artist(x))",
            "all x. (scholar(x) -> exists y. (musician(y) & love(x,y)))",
            "all x. (artist(x) -> all y. (scholar(y) -> love(x,y)))",
        ]);
        let v = solve(FragmentTag::V, &f, &SolveOptions::default()).unwrap();
        let c = v.certificate().expect("sat");
        assert!(model_check(&c.structure, &f).unwrap());
    }

    #[test]
    fn typed_certificates_with_witness_chains() {
        let cases = [
            vec![
                "exists x. p(x)",
                "all x. (p(x) -> exists y. (q(y) & r(x,y)))",
                "all x. (q(x) -> exists y. (p(y) & r(y,x)))",
            ],
            vec![
                "exists x. (p(x) & all y. (p(y) -> ~r(x,y)))",
                "all x. exists y. r(x,y)",
                "all x. (p(x) -> all y. (q(y) -> r(y,x)))",
            ],
            vec!["exists x. (a(x) & exists y. (b(y) & r(x,y)))", "all x. (b(x) -> all y. (a(y) -> ~r(y,x)))"],
            vec!["all x. ~r(x,x)", "all x. (p(x) -> exists y. r(x,y))"],
        ];
        let expected = [true, true, false, true];
        for (texts, want) in cases.iter().zip(expected) {
            let f = parse_all(texts);
            let v = solve(FragmentTag::A, &f, &SolveOptions::default());
            if texts[0] == "all x. ~r(x,x)" {
                // reflexive atoms are outside the fragments
                assert!(matches!(v, Err(SolverError::Logic(_))));
                continue;
            }
            let v = v.unwrap();
            assert_eq!(v.is_sat(), want, "{texts:?}");
            if let Some(c) = v.certificate() {
                assert!(model_check(&c.structure, &f).unwrap(), "{texts:?}");
            }
        }
    }

    #[test]
    fn empty_theory_has_one_element_model() {
        let v = solve_typed(
            &NormalTheory { signature: Signature::default(), ..Default::default() },
            &SolveOptions::default(),
        )
        .unwrap();
        assert_eq!(v.certificate().unwrap().size(), 1);
    }

    #[test]
    fn mixed_fragment_rejected() {
        let vocab = Vocabulary::default_english();
        let s = crate::grammar::parse("Every artist admires some writer", FragmentTag::V, &vocab).unwrap();
        assert!(matches!(
            solve_sentences(FragmentTag::S, &[s], &vocab, &SolveOptions::default()),
            Err(SolverError::MixedFragment { .. })
        ));
    }
}
