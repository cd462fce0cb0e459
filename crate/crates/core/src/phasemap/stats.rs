use serde::{Deserialize, Serialize};

use crate::grammar::FragmentTag;
use crate::logic::{Formula, Quantifier};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantifierCounts {
    pub exists: usize,
    pub forall: usize,
}

impl QuantifierCounts {
    fn add(&mut self, q: Quantifier) {
        match q {
            Quantifier::Exists => self.exists += 1,
            Quantifier::Forall => self.forall += 1,
        }
    }

    /// #∃ / #∀, or `None` without universal quantifiers.
    pub fn ratio(&self) -> Option<f64> {
        (self.forall > 0).then(|| self.exists as f64 / self.forall as f64)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceStats {
    pub m: usize,
    pub n1: usize,
    pub n2: usize,
    pub alpha: f64,
    pub beta: Option<f64>,
    /// Every quantifier occurrence.
    pub all: QuantifierCounts,
    pub subject: QuantifierCounts,
    /// Absent for fragments without transitive verbs.
    pub object: Option<QuantifierCounts>,
    /// Space-separated tokens of the realized sentences.
    pub tokens: usize,
}

impl InstanceStats {
    pub fn quantifier_ratio(&self) -> Option<f64> {
        self.all.ratio()
    }

    pub fn subject_ratio(&self) -> Option<f64> {
        self.subject.ratio()
    }

    pub fn object_ratio(&self) -> Option<f64> {
        self.object.and_then(|o| o.ratio())
    }
}

fn count_all(f: &Formula, c: &mut QuantifierCounts) {
    match f {
        Formula::Forall(_, g) => {
            c.add(Quantifier::Forall);
            count_all(g, c);
        }
        Formula::Exists(_, g) => {
            c.add(Quantifier::Exists);
            count_all(g, c);
        }
        Formula::Not(g) => count_all(g, c),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| count_all(g, c)),
        Formula::Implies(a, b) => {
            count_all(a, c);
            count_all(b, c);
        }
        Formula::Unary(..) | Formula::Binary(..) => {}
    }
}

/// Quantifier and size statistics of one instance. Subject quantifiers are
/// the outermost ones, object quantifiers those directly beneath.
pub fn instance_stats(
    fragment: FragmentTag,
    formulas: &[Formula],
    sentences: &[String],
    n1: usize,
    n2: usize,
) -> InstanceStats {
    let m = formulas.len();
    let mut all = QuantifierCounts::default();
    let mut subject = QuantifierCounts::default();
    let mut object = QuantifierCounts::default();
    for f in formulas {
        count_all(f, &mut all);
        let (outer, inner) = f.quantifier_roles();
        if let Some(q) = outer {
            subject.add(q);
        }
        if let Some(q) = inner {
            object.add(q);
        }
    }
    InstanceStats {
        m,
        n1,
        n2,
        alpha: m as f64 / n1.max(1) as f64,
        beta: (n2 > 0).then(|| m as f64 / n2 as f64),
        all,
        subject,
        object: fragment.has_verbs().then_some(object),
        tokens: sentences.iter().map(|s| s.split(' ').filter(|t| !t.is_empty()).count()).sum(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_fol;

    #[test]
    fn subject_and_object_counts() {
        let f = vec![
            parse_fol("all x. (p(x) -> exists y. (q(y) & r(x,y)))").unwrap(),
            parse_fol("exists x. (p(x) & q(x))").unwrap(),
        ];
        let texts = vec!["Every p rs some q.".to_string(), "Some p is a q.".to_string()];
        let s = instance_stats(FragmentTag::V, &f, &texts, 2, 1);
        assert_eq!(s.subject, QuantifierCounts { exists: 1, forall: 1 });
        assert_eq!(s.object, Some(QuantifierCounts { exists: 1, forall: 0 }));
        assert_eq!(s.quantifier_ratio(), Some(2.0));
        assert_eq!(s.object_ratio(), None);
        assert_eq!(s.tokens, 10);
        assert_eq!(s.beta, Some(2.0));
        let s = instance_stats(FragmentTag::S, &f[1..], &texts[1..], 2, 0);
        assert_eq!(s.object, None);
        assert_eq!(s.subject.exists + s.subject.forall, 1);
    }
}
