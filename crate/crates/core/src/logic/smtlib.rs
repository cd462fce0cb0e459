//! SMT-LIB 2 export for out-of-process cross-checks.

use std::fmt::Write;

use super::formula::Formula;
use super::normal::Signature;

const RESERVED: &[&str] =
    &["and", "or", "not", "xor", "ite", "let", "forall", "exists", "true", "false", "distinct", "par", "as", "assert"];

fn symbol(name: &str) -> String {
    if RESERVED.contains(&name) || name.starts_with(|c: char| c.is_ascii_digit()) {
        format!("|{name}|")
    } else {
        name.to_string()
    }
}

fn term(f: &Formula, out: &mut String) {
    match f {
        Formula::Unary(n, v) => {
            let _ = write!(out, "({} {})", symbol(n), v.name());
        }
        Formula::Binary(n, a, b) => {
            let _ = write!(out, "({} {} {})", symbol(n), a.name(), b.name());
        }
        Formula::Not(g) => {
            out.push_str("(not ");
            term(g, out);
            out.push(')');
        }
        Formula::And(gs) | Formula::Or(gs) => {
            out.push_str(if matches!(f, Formula::And(_)) { "(and" } else { "(or" });
            for g in gs {
                out.push(' ');
                term(g, out);
            }
            out.push(')');
        }
        Formula::Implies(a, b) => {
            out.push_str("(=> ");
            term(a, out);
            out.push(' ');
            term(b, out);
            out.push(')');
        }
        Formula::Forall(v, g) | Formula::Exists(v, g) => {
            let q = if matches!(f, Formula::Forall(..)) { "forall" } else { "exists" };
            let _ = write!(out, "({q} (({} U)) ", v.name());
            term(g, out);
            out.push(')');
        }
    }
}

/// SMT-LIB term for one formula.
pub fn formula_to_smtlib(f: &Formula) -> String {
    let mut s = String::new();
    term(f, &mut s);
    s
}

/// A complete script: declarations in signature order, one assertion per
/// formula, then `(check-sat)`.
pub fn to_smtlib(formulas: &[Formula], signature: &Signature) -> String {
    let mut out = String::from("(set-logic UF)\n(declare-sort U 0)\n");
    for u in &signature.unary {
        let _ = writeln!(out, "(declare-fun {} (U) Bool)", symbol(u));
    }
    for b in &signature.binary {
        let _ = writeln!(out, "(declare-fun {} (U U) Bool)", symbol(b));
    }
    for f in formulas {
        let _ = writeln!(out, "(assert {})", formula_to_smtlib(f));
    }
    out.push_str("(check-sat)\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_fol;

    #[test]
    fn layout() {
        let f = parse_fol("all x. (~p(x) -> q(x))").unwrap();
        let sig = Signature::from_formulas(std::slice::from_ref(&f));
        assert_eq!(
            to_smtlib(&[f], &sig),
            "(set-logic UF)\n(declare-sort U 0)\n(declare-fun p (U) Bool)\n(declare-fun q (U) Bool)\n\
             (assert (forall ((x U)) (=> (not (p x)) (q x))))\n(check-sat)\n"
        );
    }

    #[test]
    fn empty_and_binary() {
        assert_eq!(to_smtlib(&[], &Signature::default()), "(set-logic UF)\n(declare-sort U 0)\n(check-sat)\n");
        let f = parse_fol("exists x. (and(x) & exists y. (q(y) & r(y,x)))").unwrap();
        assert_eq!(formula_to_smtlib(&f), "(exists ((x U)) (and (|and| x) (exists ((y U)) (and (q y) (r y x)))))");
    }
}
