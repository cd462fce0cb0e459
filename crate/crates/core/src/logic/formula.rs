//! Two-variable first-order formulas and their canonical text syntax.
//!
//! Canonical syntax: `all x. (p(x) -> exists y. (q(y) & r(x,y)))`.
//! Binary connectives are always parenthesized, `&` and `|` may be chained
//! inside one pair of parentheses, negation is a prefix `~`.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::LogicError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Var {
    X,
    Y,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
        }
    }

    pub fn other(self) -> Var {
        match self {
            Var::X => Var::Y,
            Var::Y => Var::X,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Unary(String, Var),
    Binary(String, Var, Var),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(Var, Box<Formula>),
    Exists(Var, Box<Formula>),
}

impl Formula {
    pub fn unary(name: &str, var: Var) -> Formula {
        Formula::Unary(name.to_string(), var)
    }

    pub fn binary(name: &str, a: Var, b: Var) -> Formula {
        Formula::Binary(name.to_string(), a, b)
    }

    /// `f` when `positive`, otherwise `~f`; cancels a double negation.
    pub fn signed(self, positive: bool) -> Formula {
        if positive {
            self
        } else {
            self.negate()
        }
    }

    pub fn negate(self) -> Formula {
        match self {
            Formula::Not(inner) => *inner,
            other => Formula::Not(Box::new(other)),
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn forall(v: Var, body: Formula) -> Formula {
        Formula::Forall(v, Box::new(body))
    }

    pub fn exists(v: Var, body: Formula) -> Formula {
        Formula::Exists(v, Box::new(body))
    }

    /// Conjunction that collapses to the single conjunct when there is one.
    pub fn conj(mut items: Vec<Formula>) -> Formula {
        match items.len() {
            0 => panic!("empty conjunction"),
            1 => items.pop().expect("one item"),
            _ => Formula::And(items),
        }
    }

    pub fn disj(mut items: Vec<Formula>) -> Formula {
        match items.len() {
            0 => panic!("empty disjunction"),
            1 => items.pop().expect("one item"),
            _ => Formula::Or(items),
        }
    }

    pub fn render(&self) -> String {
        self.to_string()
    }

    /// Distinct variables occurring anywhere in the formula.
    pub fn variables(&self) -> Vec<Var> {
        let mut seen = [false; 2];
        self.visit_vars(&mut |v| seen[v as usize] = true);
        [Var::X, Var::Y].into_iter().filter(|v| seen[*v as usize]).collect()
    }

    fn visit_vars(&self, f: &mut impl FnMut(Var)) {
        match self {
            Formula::Unary(_, v) => f(*v),
            Formula::Binary(_, a, b) => {
                f(*a);
                f(*b);
            }
            Formula::Not(g) => g.visit_vars(f),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.visit_vars(f)),
            Formula::Implies(a, b) => {
                a.visit_vars(f);
                b.visit_vars(f);
            }
            Formula::Forall(v, g) | Formula::Exists(v, g) => {
                f(*v);
                g.visit_vars(f);
            }
        }
    }

    /// No free variables.
    pub fn is_closed(&self) -> bool {
        fn free(f: &Formula, bound: &mut Vec<Var>) -> bool {
            match f {
                Formula::Unary(_, v) => !bound.contains(v),
                Formula::Binary(_, a, b) => !bound.contains(a) || !bound.contains(b),
                Formula::Not(g) => free(g, bound),
                Formula::And(gs) | Formula::Or(gs) => gs.iter().any(|g| free(g, bound)),
                Formula::Implies(a, b) => free(a, bound) || free(b, bound),
                Formula::Forall(v, g) | Formula::Exists(v, g) => {
                    bound.push(*v);
                    let r = free(g, bound);
                    bound.pop();
                    r
                }
            }
        }
        !free(self, &mut Vec::new())
    }

    /// (unary names, binary names) in order of first occurrence.
    pub fn predicates(&self, unary: &mut Vec<String>, binary: &mut Vec<String>) {
        match self {
            Formula::Unary(n, _) => {
                if !unary.contains(n) {
                    unary.push(n.clone());
                }
            }
            Formula::Binary(n, _, _) => {
                if !binary.contains(n) {
                    binary.push(n.clone());
                }
            }
            Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => g.predicates(unary, binary),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.predicates(unary, binary)),
            Formula::Implies(a, b) => {
                a.predicates(unary, binary);
                b.predicates(unary, binary);
            }
        }
    }

    /// Applies `f` to every predicate name.
    pub fn rename(&self, f: &impl Fn(&str) -> String) -> Formula {
        match self {
            Formula::Unary(n, v) => Formula::Unary(f(n), *v),
            Formula::Binary(n, a, b) => Formula::Binary(f(n), *a, *b),
            Formula::Not(g) => Formula::Not(Box::new(g.rename(f))),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.rename(f)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.rename(f)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.rename(f), b.rename(f)),
            Formula::Forall(v, g) => Formula::forall(*v, g.rename(f)),
            Formula::Exists(v, g) => Formula::exists(*v, g.rename(f)),
        }
    }

    /// Replaces every unary atom named `name` by its negation.
    pub fn negate_predicate(&self, name: &str) -> Formula {
        match self {
            Formula::Unary(n, _) | Formula::Binary(n, _, _) if n == name => Formula::Not(Box::new(self.clone())),
            Formula::Unary(..) | Formula::Binary(..) => self.clone(),
            Formula::Not(g) => Formula::Not(Box::new(g.negate_predicate(name))),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.negate_predicate(name)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.negate_predicate(name)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.negate_predicate(name), b.negate_predicate(name)),
            Formula::Forall(v, g) => Formula::forall(*v, g.negate_predicate(name)),
            Formula::Exists(v, g) => Formula::exists(*v, g.negate_predicate(name)),
        }
    }

    /// (outermost quantifier, first quantifier directly under it), the
    /// subject and object quantifiers of a fragment sentence.
    pub fn quantifier_roles(&self) -> (Option<Quantifier>, Option<Quantifier>) {
        fn first(f: &Formula) -> Option<(Quantifier, &Formula)> {
            match f {
                Formula::Forall(_, g) => Some((Quantifier::Forall, g)),
                Formula::Exists(_, g) => Some((Quantifier::Exists, g)),
                Formula::Unary(..) | Formula::Binary(..) => None,
                Formula::Not(g) => first(g),
                Formula::And(gs) | Formula::Or(gs) => gs.iter().find_map(|g| first(g)),
                Formula::Implies(a, b) => first(a).or_else(|| first(b)),
            }
        }
        match first(self) {
            None => (None, None),
            Some((q, body)) => (Some(q), first(body).map(|(q, _)| q)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quantifier {
    Forall,
    Exists,
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Unary(n, v) => write!(f, "{n}({})", v.name()),
            Formula::Binary(n, a, b) => write!(f, "{n}({},{})", a.name(), b.name()),
            Formula::Not(g) => write!(f, "~{g}"),
            Formula::And(gs) | Formula::Or(gs) => {
                let op = if matches!(self, Formula::And(_)) { " & " } else { " | " };
                f.write_str("(")?;
                for (i, g) in gs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(op)?;
                    }
                    write!(f, "{g}")?;
                }
                f.write_str(")")
            }
            Formula::Implies(a, b) => write!(f, "({a} -> {b})"),
            Formula::Forall(v, g) => write!(f, "all {}. {g}", v.name()),
            Formula::Exists(v, g) => write!(f, "exists {}. {g}", v.name()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Not,
    And,
    Or,
    Arrow,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, LogicError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => Token::LParen,
            ')' => Token::RParen,
            ',' => Token::Comma,
            '.' => Token::Dot,
            '~' => Token::Not,
            '&' => Token::And,
            '|' => Token::Or,
            '-' if bytes.get(i + 1) == Some(&b'>') => {
                out.push((i, Token::Arrow));
                i += 2;
                continue;
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Token::Ident(text[start..i].to_string())));
                continue;
            }
            other => {
                return Err(LogicError::Syntax { position: i, message: format!("unexpected character {other:?}") })
            }
        };
        out.push((i, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, LogicError> {
        Err(LogicError::Syntax { position: self.offset(), message: message.into() })
    }

    fn expect(&mut self, tok: Token, what: &str) -> Result<(), LogicError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn var(&mut self) -> Result<Var, LogicError> {
        match self.peek() {
            Some(Token::Ident(s)) if s == "x" => {
                self.pos += 1;
                Ok(Var::X)
            }
            Some(Token::Ident(s)) if s == "y" => {
                self.pos += 1;
                Ok(Var::Y)
            }
            _ => self.error("expected variable `x` or `y`"),
        }
    }

    fn primary(&mut self) -> Result<Formula, LogicError> {
        match self.peek().cloned() {
            Some(Token::Not) => {
                self.pos += 1;
                Ok(Formula::Not(Box::new(self.primary()?)))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let first = self.primary()?;
                let result = match self.peek() {
                    Some(Token::RParen) => first,
                    Some(Token::Arrow) => {
                        self.pos += 1;
                        let second = self.primary()?;
                        Formula::implies(first, second)
                    }
                    Some(op @ (Token::And | Token::Or)) => {
                        let op = op.clone();
                        let mut items = vec![first];
                        while self.peek() == Some(&op) {
                            self.pos += 1;
                            items.push(self.primary()?);
                        }
                        if op == Token::And {
                            Formula::And(items)
                        } else {
                            Formula::Or(items)
                        }
                    }
                    _ => return self.error("expected `&`, `|`, `->` or `)`"),
                };
                self.expect(Token::RParen, "`)`")?;
                Ok(result)
            }
            Some(Token::Ident(word)) if word == "all" || word == "exists" => {
                self.pos += 1;
                let v = self.var()?;
                self.expect(Token::Dot, "`.` after quantified variable")?;
                let body = self.primary()?;
                Ok(if word == "all" { Formula::forall(v, body) } else { Formula::exists(v, body) })
            }
            Some(Token::Ident(name)) => {
                if name == "x" || name == "y" {
                    return self.error("variable used as predicate");
                }
                self.pos += 1;
                self.expect(Token::LParen, "`(` after predicate name")?;
                let a = self.var()?;
                let result = if self.peek() == Some(&Token::Comma) {
                    self.pos += 1;
                    let b = self.var()?;
                    Formula::Binary(name, a, b)
                } else {
                    Formula::Unary(name, a)
                };
                self.expect(Token::RParen, "`)`")?;
                Ok(result)
            }
            Some(_) => self.error("expected a formula"),
            None => self.error("unexpected end of input"),
        }
    }
}

/// Parses the canonical text syntax.
pub fn parse_fol(text: &str) -> Result<Formula, LogicError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0, end: text.len() };
    let f = parser.primary()?;
    if parser.pos != parser.tokens.len() {
        return parser.error("trailing input");
    }
    Ok(f)
}

pub fn render_fol(f: &Formula) -> String {
    f.render()
}
