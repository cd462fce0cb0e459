//! Bounded finite-model search by grounding formulas into CNF.
//!
//! Works directly on [`Formula`] trees and shares no code with the
//! normal-form solvers, which makes it usable as a differential oracle.

use std::collections::HashMap;

use crate::logic::{Formula, Signature};

use super::cnf::{cnf_sat_with, CnfFormula, CnfOptions, CnfResult, Engine};
use super::model::Structure;
use super::SolverError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroundResult {
    Model(Structure),
    NoModelUpTo(usize),
}

impl GroundResult {
    pub fn is_model(&self) -> bool {
        matches!(self, GroundResult::Model(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroundOptions {
    /// Largest grounded clause count tried before giving up.
    pub clause_cap: usize,
    pub cnf: CnfOptions,
}

impl Default for GroundOptions {
    fn default() -> Self {
        GroundOptions { clause_cap: 2_000_000, cnf: CnfOptions { engine: Engine::Cdcl, ..CnfOptions::default() } }
    }
}

struct Grounder<'a> {
    d: usize,
    unary: HashMap<&'a str, usize>,
    binary: HashMap<&'a str, usize>,
    n1: usize,
    cnf: CnfFormula,
    cap: usize,
}

impl Grounder<'_> {
    fn unary_var(&self, p: usize, e: usize) -> i32 {
        (e * self.n1 + p + 1) as i32
    }

    fn binary_var(&self, r: usize, a: usize, b: usize) -> i32 {
        (self.d * self.n1 + (r * self.d + a) * self.d + b + 1) as i32
    }

    fn check_cap(&self) -> Result<(), SolverError> {
        if self.cnf.clauses.len() > self.cap {
            Err(SolverError::ResourceLimit(format!("grounding exceeds {} clauses", self.cap)))
        } else {
            Ok(())
        }
    }

    /// Tseitin literal equivalent to `items` combined by and/or.
    fn gate(&mut self, items: Vec<i32>, conjunction: bool) -> Result<i32, SolverError> {
        if items.len() == 1 {
            return Ok(items[0]);
        }
        let t = self.cnf.new_var();
        // and: t -> each, all -> t.  or: each -> t, t -> some.
        let s = if conjunction { 1 } else { -1 };
        let mut big = vec![s * t];
        for &c in &items {
            self.cnf.add_clause(vec![-s * t, s * c]);
            big.push(-s * c);
        }
        self.cnf.add_clause(big);
        self.check_cap()?;
        Ok(t)
    }

    fn ground(&mut self, f: &Formula, env: &mut [usize; 2]) -> Result<i32, SolverError> {
        let missing = |n: &str| SolverError::SignatureMismatch(n.to_string());
        match f {
            Formula::Unary(n, v) => {
                let p = *self.unary.get(n.as_str()).ok_or_else(|| missing(n))?;
                Ok(self.unary_var(p, env[*v as usize]))
            }
            Formula::Binary(n, a, b) => {
                let r = *self.binary.get(n.as_str()).ok_or_else(|| missing(n))?;
                Ok(self.binary_var(r, env[*a as usize], env[*b as usize]))
            }
            Formula::Not(g) => Ok(-self.ground(g, env)?),
            Formula::And(gs) | Formula::Or(gs) => {
                let items = gs.iter().map(|g| self.ground(g, env)).collect::<Result<Vec<_>, _>>()?;
                self.gate(items, matches!(f, Formula::And(_)))
            }
            Formula::Implies(a, b) => {
                let items = vec![-self.ground(a, env)?, self.ground(b, env)?];
                self.gate(items, false)
            }
            Formula::Forall(v, g) | Formula::Exists(v, g) => {
                let saved = env[*v as usize];
                let mut items = Vec::with_capacity(self.d);
                for e in 0..self.d {
                    env[*v as usize] = e;
                    items.push(self.ground(g, env)?);
                }
                env[*v as usize] = saved;
                self.gate(items, matches!(f, Formula::Forall(..)))
            }
        }
    }
}

/// Looks for a model of exactly `d` elements.
pub fn ground_at(
    formulas: &[Formula],
    signature: &Signature,
    d: usize,
    options: &GroundOptions,
) -> Result<Option<Structure>, SolverError> {
    if d == 0 {
        return Err(SolverError::EmptyDomain);
    }
    let n1 = signature.unary.len();
    let atoms = d * n1 + d * d * signature.binary.len();
    let mut g = Grounder {
        d,
        unary: signature.unary.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect(),
        binary: signature.binary.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect(),
        n1,
        cnf: CnfFormula::new(atoms),
        cap: options.clause_cap,
    };
    for f in formulas {
        let mut env = [0usize; 2];
        let lit = g.ground(f, &mut env)?;
        g.cnf.add_clause(vec![lit]);
    }
    match cnf_sat_with(&g.cnf, &[], &options.cnf).0 {
        CnfResult::Sat(a) => {
            let mut m = Structure::new(d, signature.clone());
            for e in 0..d {
                for p in 0..n1 {
                    m.set_unary(p, e, a[g.unary_var(p, e) as usize - 1]);
                }
            }
            for r in 0..signature.binary.len() {
                for x in 0..d {
                    for y in 0..d {
                        m.set_binary(r, x, y, a[g.binary_var(r, x, y) as usize - 1]);
                    }
                }
            }
            Ok(Some(m))
        }
        CnfResult::Unsat => Ok(None),
        CnfResult::Unknown => Err(SolverError::ResourceLimit("grounded search budget exhausted".into())),
    }
}

/// Searches for a model over domain sizes `1..=d`, returning the first found.
pub fn ground_check(formulas: &[Formula], signature: &Signature, d: usize) -> Result<GroundResult, SolverError> {
    ground_check_with(formulas, signature, d, &GroundOptions::default())
}

pub fn ground_check_with(
    formulas: &[Formula],
    signature: &Signature,
    d: usize,
    options: &GroundOptions,
) -> Result<GroundResult, SolverError> {
    if d == 0 {
        return Err(SolverError::EmptyDomain);
    }
    for size in 1..=d {
        if let Some(m) = ground_at(formulas, signature, size, options)? {
            return Ok(GroundResult::Model(m));
        }
    }
    Ok(GroundResult::NoModelUpTo(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_fol;
    use crate::solver::model_check;

    fn fs(texts: &[&str]) -> (Vec<Formula>, Signature) {
        let f: Vec<Formula> = texts.iter().map(|t| parse_fol(t).unwrap()).collect();
        let s = Signature::from_formulas(&f);
        (f, s)
    }

    #[test]
    fn scholar_musician_satisfiable_set() {
        let (f, s) = fs(&[
            "exists x. (scholar(x) & scholar(x))",
            "all x. (musician(x) -> artist(x))",
            "all x. (scholar(x) -> all y. (musician(y) -> love(x,y)))",
            "all x. (artist(x) -> exists y. (scholar(y) & love(x,y)))",
        ]);
        match ground_check(&f, &s, 2).unwrap() {
            GroundResult::Model(m) => assert!(model_check(&m, &f).unwrap()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn needs_two_elements() {
        let (f, s) = fs(&["exists x. p(x)", "exists x. ~p(x)"]);
        match ground_check(&f, &s, 3).unwrap() {
            GroundResult::Model(m) => assert_eq!(m.size, 2),
            other => panic!("{other:?}"),
        }
        let (g, s) = fs(&["exists x. p(x)", "all x. ~p(x)"]);
        assert_eq!(ground_check(&g, &s, 3).unwrap(), GroundResult::NoModelUpTo(3));
    }
}
