//! Decision procedures for theories without binary constraints: 2-SAT over
//! an implication graph for fragment S, per-realizer DPLL for fragment W.

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::logic::{Atom, Lit, NormalTheory};

use super::cnf::{cnf_sat_with, CnfFormula, CnfOptions, CnfResult};
use super::model::{ModelCertificate, Structure};
use super::SolverError;

fn unary_pred(l: &Lit) -> usize {
    match l.atom {
        Atom::X(p) => p,
        _ => unreachable!("unary theory"),
    }
}

fn node(l: &Lit) -> usize {
    2 * unary_pred(l) + usize::from(!l.positive)
}

/// 2-SAT over `n` variables; clauses have one or two literals. Returns a
/// satisfying assignment or `None`.
fn two_sat(n: usize, clauses: &[&[Lit]]) -> Option<Vec<bool>> {
    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(2 * n, 2 * clauses.len());
    for _ in 0..2 * n {
        g.add_node(());
    }
    let mut edge = |a: usize, b: usize| {
        g.add_edge(NodeIndex::new(a), NodeIndex::new(b), ());
    };
    for c in clauses {
        match c {
            [] => return None,
            [a] => edge(node(a) ^ 1, node(a)),
            [a, b] => {
                edge(node(a) ^ 1, node(b));
                edge(node(b) ^ 1, node(a));
            }
            _ => unreachable!("2-SAT clause wider than two"),
        }
    }
    // Components come out in reverse topological order.
    let mut comp = vec![0usize; 2 * n];
    for (i, scc) in tarjan_scc(&g).iter().enumerate() {
        for v in scc {
            comp[v.index()] = i;
        }
    }
    (0..n)
        .map(|v| {
            let (pos, neg) = (comp[2 * v], comp[2 * v + 1]);
            (pos != neg).then_some(pos < neg)
        })
        .collect()
}

fn certificate(theory: &NormalTheory, elements: Vec<Vec<bool>>) -> ModelCertificate {
    let mut s = Structure::new(elements.len(), theory.signature.clone());
    for (e, bits) in elements.iter().enumerate() {
        for (p, &b) in bits.iter().enumerate() {
            s.set_unary(p, e, b);
        }
    }
    ModelCertificate { structure: s, realizers: (0..theory.realizers.len()).collect(), witnesses: Vec::new() }
}

fn check_unary(theory: &NormalTheory, width: usize, name: &str) -> Result<(), SolverError> {
    let wide = theory.max_unary_width() > width || theory.realizers.iter().any(|r| r.lits.len() > width);
    if !theory.is_unary() || wide {
        return Err(SolverError::WrongFragment(format!("theory is outside fragment {name}")));
    }
    Ok(())
}

/// Fragment S: universal part by implication-graph 2-SAT, then each realizer
/// as 2-SAT plus its unit literals. One element per realizer.
pub(crate) fn decide_s(theory: &NormalTheory) -> Result<Option<ModelCertificate>, SolverError> {
    check_unary(theory, 2, "S")?;
    let n = theory.signature.unary.len();
    let base: Vec<&[Lit]> = theory.unary_clauses.iter().map(|c| c.lits.as_slice()).collect();
    let Some(universal) = two_sat(n, &base) else {
        return Ok(None);
    };
    if theory.realizers.is_empty() {
        return Ok(Some(certificate(theory, vec![universal])));
    }
    let mut elements = Vec::with_capacity(theory.realizers.len());
    for r in &theory.realizers {
        let mut clauses = base.clone();
        clauses.extend(r.lits.iter().map(std::slice::from_ref));
        match two_sat(n, &clauses) {
            Some(a) => elements.push(a),
            None => return Ok(None),
        }
    }
    Ok(Some(certificate(theory, elements)))
}

/// Fragment W: one DPLL call per realizer over the unary predicates.
pub(crate) fn decide_w(theory: &NormalTheory, options: &CnfOptions) -> Result<Option<ModelCertificate>, SolverError> {
    check_unary(theory, 3, "W")?;
    let n = theory.signature.unary.len();
    let var = |l: &Lit| {
        let v = unary_pred(l) as i32 + 1;
        if l.positive {
            v
        } else {
            -v
        }
    };
    let mut cnf = CnfFormula::new(n);
    for c in &theory.unary_clauses {
        cnf.add_clause(c.lits.iter().map(var).collect());
    }
    let run = |assumptions: Vec<i32>| match cnf_sat_with(&cnf, &assumptions, options).0 {
        CnfResult::Sat(a) => Ok(Some(a)),
        CnfResult::Unsat => Ok(None),
        CnfResult::Unknown => Err(SolverError::Timeout),
    };
    if theory.realizers.is_empty() {
        return Ok(run(Vec::new())?.map(|a| certificate(theory, vec![a])));
    }
    let mut elements = Vec::with_capacity(theory.realizers.len());
    for r in &theory.realizers {
        match run(r.lits.iter().map(var).collect())? {
            Some(a) => elements.push(a),
            None => return Ok(None),
        }
    }
    Ok(Some(certificate(theory, elements)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{normalize, parse_fol, Formula};
    use crate::solver::model_check;

    fn theory(texts: &[&str]) -> (Vec<Formula>, NormalTheory) {
        let f: Vec<Formula> = texts.iter().map(|t| parse_fol(t).unwrap()).collect();
        let t = normalize(&f).unwrap();
        (f, t)
    }

    #[test]
    fn s_examples() {
        let (f, t) = theory(&["exists x. (artist(x) & artist(x))"]);
        let m = decide_s(&t).unwrap().unwrap();
        assert_eq!(m.size(), 1);
        assert!(model_check(&m.structure, &f).unwrap());
        let (_, t) = theory(&["all x. (artist(x) -> beekeeper(x))", "exists x. (artist(x) & ~beekeeper(x))"]);
        assert!(decide_s(&t).unwrap().is_none());
    }

    #[test]
    fn s_chain_of_implications() {
        let (f, t) = theory(&[
            "all x. (a(x) -> b(x))",
            "all x. (b(x) -> c(x))",
            "all x. (~c(x) -> d(x))",
            "exists x. (a(x) & ~d(x))",
            "exists x. (~a(x) & ~c(x))",
        ]);
        let m = decide_s(&t).unwrap().unwrap();
        assert_eq!(m.size(), 2);
        assert!(model_check(&m.structure, &f).unwrap());
        let (_, t) = theory(&["all x. (a(x) -> b(x))", "all x. (b(x) -> ~a(x))", "exists x. (a(x) & a(x))"]);
        assert!(decide_s(&t).unwrap().is_none());
    }

    #[test]
    fn w_examples() {
        let (f, t) = theory(&["exists x. (artist(x) & beekeeper(x))", "exists x. (~artist(x) & carpenter(x))"]);
        let m = decide_w(&t, &CnfOptions::default()).unwrap().unwrap();
        assert_eq!(m.size(), 2);
        assert!(model_check(&m.structure, &f).unwrap());
        let (_, t) = theory(&[
            "all x. ((artist(x) & beekeeper(x)) -> carpenter(x))",
            "exists x. (artist(x) & beekeeper(x) & ~carpenter(x))",
        ]);
        assert!(decide_w(&t, &CnfOptions::default()).unwrap().is_none());
    }

    #[test]
    fn rejects_wrong_fragment() {
        let (_, t) = theory(&["all x. ((a(x) & b(x)) -> c(x))"]);
        assert!(matches!(decide_s(&t), Err(SolverError::WrongFragment(_))));
        let (_, t) = theory(&["all x. (a(x) -> exists y. r(x,y))"]);
        assert!(matches!(decide_w(&t, &CnfOptions::default()), Err(SolverError::WrongFragment(_))));
    }
}
