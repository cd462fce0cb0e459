//! Finite structures, model certificates and the independent model checker.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::logic::{Atom, Formula, Lit, NormalTheory, Signature, Var};

use super::SolverError;

/// A finite structure over a signature. Unary atoms are stored
/// element-major, binary atoms as `[pred][a][b]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Structure {
    pub size: usize,
    pub signature: Signature,
    unary: Vec<bool>,
    binary: Vec<bool>,
}

impl Structure {
    pub fn new(size: usize, signature: Signature) -> Self {
        let unary = vec![false; size * signature.unary.len()];
        let binary = vec![false; size * size * signature.binary.len()];
        Structure { size, signature, unary, binary }
    }

    pub fn unary(&self, pred: usize, elem: usize) -> bool {
        self.unary[elem * self.signature.unary.len() + pred]
    }

    pub fn set_unary(&mut self, pred: usize, elem: usize, value: bool) {
        let n = self.signature.unary.len();
        self.unary[elem * n + pred] = value;
    }

    pub fn binary(&self, pred: usize, a: usize, b: usize) -> bool {
        self.binary[(pred * self.size + a) * self.size + b]
    }

    pub fn set_binary(&mut self, pred: usize, a: usize, b: usize, value: bool) {
        let i = (pred * self.size + a) * self.size + b;
        self.binary[i] = value;
    }

    /// Adds a copy `a'` of element `a`: same unary atoms, the same links to
    /// every other element, and both links between `a` and `a'` (and the
    /// loop on `a'`) copied from the loop on `a`. Returns the new element.
    pub fn duplicate(&self, a: usize) -> Structure {
        let n = self.size + 1;
        let mut out = Structure::new(n, self.signature.clone());
        let src = |e: usize| if e == self.size { a } else { e };
        for e in 0..n {
            for p in 0..self.signature.unary.len() {
                out.set_unary(p, e, self.unary(p, src(e)));
            }
        }
        for r in 0..self.signature.binary.len() {
            for x in 0..n {
                for y in 0..n {
                    let (sx, sy) = (src(x), src(y));
                    // between a and its copy use the loop on a
                    let v = if sx == sy { self.binary(r, sx, sx) } else { self.binary(r, sx, sy) };
                    out.set_binary(r, x, y, v);
                }
            }
        }
        out
    }

    /// Element-major listing of the true atoms, e.g. `["artist", "admire:2"]`
    /// meaning `artist(e)` and `admire(e, 2)`.
    pub fn element_atoms(&self) -> Vec<Vec<String>> {
        (0..self.size)
            .map(|e| {
                let mut atoms: Vec<String> = (0..self.signature.unary.len())
                    .filter(|&p| self.unary(p, e))
                    .map(|p| self.signature.unary[p].clone())
                    .collect();
                for r in 0..self.signature.binary.len() {
                    for b in 0..self.size {
                        if self.binary(r, e, b) {
                            atoms.push(format!("{}:{b}", self.signature.binary[r]));
                        }
                    }
                }
                atoms
            })
            .collect()
    }

    /// Inverse of [`Structure::element_atoms`].
    pub fn from_element_atoms(signature: Signature, atoms: &[Vec<String>]) -> Result<Structure, SolverError> {
        let mut s = Structure::new(atoms.len(), signature);
        for (e, list) in atoms.iter().enumerate() {
            for atom in list {
                match atom.split_once(':') {
                    None => {
                        let p = s
                            .signature
                            .unary_index(atom)
                            .ok_or_else(|| SolverError::SignatureMismatch(atom.clone()))?;
                        s.set_unary(p, e, true);
                    }
                    Some((name, b)) => {
                        let r = s
                            .signature
                            .binary_index(name)
                            .ok_or_else(|| SolverError::SignatureMismatch(name.to_string()))?;
                        let b: usize = b
                            .parse()
                            .ok()
                            .filter(|b| *b < atoms.len())
                            .ok_or_else(|| SolverError::SignatureMismatch(atom.clone()))?;
                        s.set_binary(r, e, b, true);
                    }
                }
            }
        }
        Ok(s)
    }
}

/// A demand served by a witness element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Demand {
    /// Witness requirement index in the normal theory.
    Requirement(usize),
    /// One-shot witness `w` of realizer `i`.
    OneShot(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessEdge {
    pub element: usize,
    pub demand: Demand,
    pub witness: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelCertificate {
    pub structure: Structure,
    /// Realizing element of each realizer, in theory order.
    pub realizers: Vec<usize>,
    pub witnesses: Vec<WitnessEdge>,
}

impl ModelCertificate {
    pub fn size(&self) -> usize {
        self.structure.size
    }
}

#[derive(Clone, Debug)]
enum Compiled {
    Unary(usize, Var),
    Binary(usize, Var, Var),
    Not(Box<Compiled>),
    And(Vec<Compiled>),
    Or(Vec<Compiled>),
    Implies(Box<Compiled>, Box<Compiled>),
    Forall(Var, Box<Compiled>),
    Exists(Var, Box<Compiled>),
}

fn compile(f: &Formula, unary: &HashMap<&str, usize>, binary: &HashMap<&str, usize>) -> Result<Compiled, SolverError> {
    let missing = |n: &str| SolverError::SignatureMismatch(n.to_string());
    Ok(match f {
        Formula::Unary(n, v) => Compiled::Unary(*unary.get(n.as_str()).ok_or_else(|| missing(n))?, *v),
        Formula::Binary(n, a, b) => Compiled::Binary(*binary.get(n.as_str()).ok_or_else(|| missing(n))?, *a, *b),
        Formula::Not(g) => Compiled::Not(Box::new(compile(g, unary, binary)?)),
        Formula::And(gs) => Compiled::And(gs.iter().map(|g| compile(g, unary, binary)).collect::<Result<_, _>>()?),
        Formula::Or(gs) => Compiled::Or(gs.iter().map(|g| compile(g, unary, binary)).collect::<Result<_, _>>()?),
        Formula::Implies(a, b) => {
            Compiled::Implies(Box::new(compile(a, unary, binary)?), Box::new(compile(b, unary, binary)?))
        }
        Formula::Forall(v, g) => Compiled::Forall(*v, Box::new(compile(g, unary, binary)?)),
        Formula::Exists(v, g) => Compiled::Exists(*v, Box::new(compile(g, unary, binary)?)),
    })
}

fn eval(f: &Compiled, m: &Structure, env: &mut [usize; 2]) -> bool {
    match f {
        Compiled::Unary(p, v) => m.unary(*p, env[*v as usize]),
        Compiled::Binary(r, a, b) => m.binary(*r, env[*a as usize], env[*b as usize]),
        Compiled::Not(g) => !eval(g, m, env),
        Compiled::And(gs) => gs.iter().all(|g| eval(g, m, env)),
        Compiled::Or(gs) => gs.iter().any(|g| eval(g, m, env)),
        Compiled::Implies(a, b) => !eval(a, m, env) || eval(b, m, env),
        Compiled::Forall(v, g) | Compiled::Exists(v, g) => {
            let saved = env[*v as usize];
            let universal = matches!(f, Compiled::Forall(..));
            let mut result = universal;
            for e in 0..m.size {
                env[*v as usize] = e;
                if eval(g, m, env) != universal {
                    result = !universal;
                    break;
                }
            }
            env[*v as usize] = saved;
            result
        }
    }
}

/// Whether every formula is true in `m`, by direct quantifier expansion.
/// Predicates are resolved by name against the structure's signature.
pub fn model_check(m: &Structure, formulas: &[Formula]) -> Result<bool, SolverError> {
    let sig = &m.signature;
    let unary: HashMap<&str, usize> = sig.unary.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let binary: HashMap<&str, usize> = sig.binary.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let compiled = formulas.iter().map(|f| compile(f, &unary, &binary)).collect::<Result<Vec<_>, _>>()?;
    if m.size == 0 {
        return Err(SolverError::EmptyDomain);
    }
    let mut env = [0usize; 2];
    Ok(compiled.iter().all(|f| eval(f, m, &mut env)))
}

fn lit_holds(m: &Structure, l: &Lit, x: usize, y: usize) -> bool {
    let v = match l.atom {
        Atom::X(p) => m.unary(p, x),
        Atom::Y(p) => m.unary(p, y),
        Atom::XY(r) => m.binary(r, x, y),
        Atom::YX(r) => m.binary(r, y, x),
    };
    v == l.positive
}

/// Truth of a normal theory in `m` (whose signature must be the theory's).
pub fn theory_holds(m: &Structure, t: &NormalTheory) -> bool {
    let n = m.size;
    let clause = |c: &[Lit], x: usize, y: usize| c.iter().any(|l| lit_holds(m, l, x, y));
    let conj = |c: &[Lit], x: usize, y: usize| c.iter().all(|l| lit_holds(m, l, x, y));
    t.unary_clauses.iter().all(|c| (0..n).all(|x| clause(&c.lits, x, x)))
        && t.guard_clauses.iter().all(|c| (0..n).all(|x| (0..n).all(|y| clause(&c.lits, x, y))))
        && t.witness_requirements
            .iter()
            .all(|w| (0..n).all(|x| !conj(&w.guard, x, x) || (0..n).any(|y| conj(&w.body, x, y))))
        && t.realizers.iter().all(|r| {
            (0..n).any(|x| {
                conj(&r.lits, x, x)
                    && r.obligations.iter().all(|o| (0..n).all(|y| clause(o, x, y)))
                    && r.witnesses.iter().all(|w| (0..n).any(|y| conj(w, x, y)))
            })
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_fol;

    fn sig(u: &[&str], b: &[&str]) -> Signature {
        Signature {
            unary: u.iter().map(|s| s.to_string()).collect(),
            binary: b.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn single_element() {
        let mut m = Structure::new(1, sig(&["artist"], &[]));
        m.set_unary(0, 0, true);
        let some = parse_fol("exists x. (artist(x) & artist(x))").unwrap();
        let no = parse_fol("all x. (artist(x) -> ~artist(x))").unwrap();
        assert!(model_check(&m, &[some]).unwrap());
        assert!(!model_check(&m, &[no]).unwrap());
        let other = parse_fol("exists x. writer(x)").unwrap();
        assert!(matches!(model_check(&m, &[other]), Err(SolverError::SignatureMismatch(_))));
    }

    #[test]
    fn duplicate_and_atoms_round_trip() {
        let mut m = Structure::new(2, sig(&["p"], &["r"]));
        m.set_unary(0, 1, true);
        m.set_binary(0, 0, 1, true);
        m.set_binary(0, 1, 1, true);
        let d = m.duplicate(1);
        assert_eq!(d.size, 3);
        assert!(d.unary(0, 2) && d.binary(0, 0, 2) && d.binary(0, 1, 2) && d.binary(0, 2, 1) && d.binary(0, 2, 2));
        let atoms = d.element_atoms();
        assert_eq!(Structure::from_element_atoms(d.signature.clone(), &atoms).unwrap(), d);
    }
}
