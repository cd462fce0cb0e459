//! Certificate search for theories with binary constraints (fragments V, Z
//! and A).
//!
//! A model is summarized by a set `T` of unary patterns (the unary part of
//! a 1-type) plus one "special" element per realizer. Because none of the
//! fragments has equality, elements can be cloned freely, so it suffices
//! that
//!
//! * every pattern in `T` is consistent with some choice of diagonal atoms,
//! * every two distinct patterns in `T`, and every special against every
//!   pattern and every other special, admit a link assignment,
//! * every demand (witness requirement of a pattern, or requirement and
//!   one-shot witness of a special) has a target pattern in `T` with a link
//!   satisfying the demanded literals.
//!
//! Link feasibility only depends on which clauses the unary patterns of
//! the two ends leave open and on the obligations of specials, so patterns
//! are grouped into classes with identical open clauses and each class
//! combination is decided once by a small DPLL over the `2·n₂` link bits.
//! The choice of `T` and of the specials is then a propositional problem
//! (membership, class exclusions, demand coverage) handed to the CDCL
//! engine; redundant patterns are pruned from the model before the
//! certificate is built.

use std::collections::HashMap;

use rustc_hash::FxHashMap;
use std::time::Instant;

use crate::logic::{Atom, Lit, NormalTheory};

use super::cnf::{cnf_sat_with, CnfFormula, CnfOptions, CnfResult, Engine};
use super::model::{Demand, ModelCertificate, Structure, WitnessEdge};
use super::SolverError;

const NO_REALIZER: u32 = u32::MAX;
const MAX_UNARY: usize = 20;
const MAX_BINARY: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Body {
    None,
    Requirement(u32),
    OneShot(u32, u32),
}

/// Element description: type index and realizer whose obligations it
/// carries.
type End = (u32, u32);

#[derive(Clone, Debug)]
struct TypeInfo {
    bits: u32,
    diag: u64,
    class: u32,
    requirements: Vec<u32>,
}

/// A clause compiled against unary patterns: it is active (not already
/// satisfied by unary literals) iff `(ux & xmask) == xfalse` and
/// `(uy & ymask) == yfalse`; its binary part is `pos`/`neg` over link bits
/// (bit `2i` is `r(x,y)`, bit `2i+1` is `r(y,x)`).
#[derive(Clone, Copy, Debug)]
struct Clause {
    xmask: u32,
    xfalse: u32,
    ymask: u32,
    yfalse: u32,
    pos: u64,
    neg: u64,
}

const EVEN: u64 = 0x5555_5555_5555_5555;

fn swap_pairs(m: u64) -> u64 {
    ((m & EVEN) << 1) | ((m >> 1) & EVEN)
}

/// Collapses link bits onto diagonal bits: both `r(x,y)` and `r(y,x)` are
/// `r(x,x)` when `x = y`.
fn fold_pairs(m: u64) -> u64 {
    let both = (m | (m >> 1)) & EVEN;
    let mut out = 0;
    let mut rest = both;
    while rest != 0 {
        let bit = rest.trailing_zeros();
        out |= 1 << (bit / 2);
        rest &= rest - 1;
    }
    out
}

impl Clause {
    /// `None` for tautologies.
    fn compile(lits: &[Lit], upos: &[Option<usize>], bpos: &[Option<usize>]) -> Option<Clause> {
        let mut c = Clause { xmask: 0, xfalse: 0, ymask: 0, yfalse: 0, pos: 0, neg: 0 };
        for l in lits {
            match l.atom {
                Atom::X(p) | Atom::Y(p) => {
                    let bit = 1u32 << upos[p].expect("relevant predicate");
                    let (mask, falsy) = if matches!(l.atom, Atom::X(_)) {
                        (&mut c.xmask, &mut c.xfalse)
                    } else {
                        (&mut c.ymask, &mut c.yfalse)
                    };
                    let want = if l.positive { 0 } else { bit };
                    if *mask & bit != 0 && *falsy & bit != want {
                        return None;
                    }
                    *mask |= bit;
                    *falsy |= want;
                }
                Atom::XY(r) | Atom::YX(r) => {
                    let i = bpos[r].expect("relevant predicate");
                    let bit = 1u64 << (2 * i + usize::from(matches!(l.atom, Atom::YX(_))));
                    if l.positive {
                        c.pos |= bit;
                    } else {
                        c.neg |= bit;
                    }
                }
            }
        }
        (c.pos & c.neg == 0).then_some(c)
    }

    /// Residual clause over diagonal bits at `x = y`.
    fn diagonal(&self, u: u32) -> Option<(u64, u64)> {
        let shared = self.xmask & self.ymask;
        if self.xfalse & shared != self.yfalse & shared {
            return None;
        }
        if u & self.xmask != self.xfalse || u & self.ymask != self.yfalse {
            return None;
        }
        let (pos, neg) = (fold_pairs(self.pos), fold_pairs(self.neg));
        // r(x,y) ∨ ¬r(y,x) is a tautology on the diagonal
        (pos & neg == 0).then_some((pos, neg))
    }
}

/// A conjunction of literals demanded of a witness: unary conditions on
/// both ends and forced link bits.
#[derive(Clone, Copy, Debug)]
struct Conj {
    xmask: u32,
    xval: u32,
    ymask: u32,
    yval: u32,
    pos: u64,
    neg: u64,
}

impl Conj {
    fn compile(lits: &[Lit], upos: &[Option<usize>], bpos: &[Option<usize>]) -> Conj {
        let mut c = Conj { xmask: 0, xval: 0, ymask: 0, yval: 0, pos: 0, neg: 0 };
        for l in lits {
            match l.atom {
                Atom::X(p) | Atom::Y(p) => {
                    let bit = 1u32 << upos[p].expect("relevant predicate");
                    let (mask, val) = if matches!(l.atom, Atom::X(_)) {
                        (&mut c.xmask, &mut c.xval)
                    } else {
                        (&mut c.ymask, &mut c.yval)
                    };
                    if *mask & bit != 0 && (*val & bit != 0) != l.positive {
                        // contradictory: make it unsatisfiable
                        c.pos |= 1;
                        c.neg |= 1;
                    }
                    *mask |= bit;
                    if l.positive {
                        *val |= bit;
                    }
                }
                Atom::XY(r) | Atom::YX(r) => {
                    let i = bpos[r].expect("relevant predicate");
                    let bit = 1u64 << (2 * i + usize::from(matches!(l.atom, Atom::YX(_))));
                    if l.positive {
                        c.pos |= bit;
                    } else {
                        c.neg |= bit;
                    }
                }
            }
        }
        c
    }
}

/// DPLL over at most 64 variables held in bit masks. `t`/`f` are the
/// variables already fixed true/false; returns the true set of a model
/// (free variables false).
fn small_sat(clauses: &[(u64, u64)], mut t: u64, mut f: u64) -> Option<u64> {
    if t & f != 0 {
        return None;
    }
    loop {
        let mut changed = false;
        let mut branch = 0u64;
        for &(p, n) in clauses {
            if p & t != 0 || n & f != 0 {
                continue;
            }
            let fp = p & !f;
            let fneg = n & !t;
            let free = fp | fneg;
            if free == 0 {
                return None;
            }
            if free & (free - 1) == 0 {
                if fp != 0 {
                    t |= fp;
                } else {
                    f |= fneg;
                }
                changed = true;
            } else if branch == 0 {
                branch = free & free.wrapping_neg();
            }
        }
        if !changed {
            if branch == 0 {
                return Some(t);
            }
            return small_sat(clauses, t, f | branch).or_else(|| small_sat(clauses, t | branch, f));
        }
    }
}

pub(crate) enum Search {
    Found(ModelCertificate),
    Unsat,
    Timeout,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Budget {
    pub nodes: u64,
    pub deadline: Option<Instant>,
}

struct Ctx<'a> {
    th: &'a NormalTheory,
    upos: Vec<Option<usize>>,
    bpos: Vec<Option<usize>>,
    types: Vec<TypeInfo>,
    /// guards first, then every realizer's obligations
    clauses: Vec<Clause>,
    guard_count: usize,
    /// per realizer: indices into `clauses`
    obligations: Vec<Vec<usize>>,
    /// per realizer: first realizer with the same obligations, or
    /// `NO_REALIZER` when it has none (such specials link like pool elements)
    group: Vec<u32>,
    requirement_bodies: Vec<Conj>,
    oneshot_bodies: Vec<Vec<Conj>>,
    /// per class: clauses whose x part resp. y part is falsified
    class_active: Vec<(Vec<u64>, Vec<u64>)>,
    /// clause masks in force for pool elements (index 0) and for the
    /// specials of each group representative `i` (index `i + 1`)
    scopes: Vec<Vec<u64>>,
    scratch: Vec<(u64, u64)>,
    open_memo: FxHashMap<(u64, u64, u64, u64), Option<u64>>,
    class_members: Vec<Vec<u32>>,
    /// per realizer: (type, diagonal bits)
    candidates: Vec<Vec<(u32, u64)>>,
    cores: FxHashMap<(u32, u32, u32, u32, Body), Option<u64>>,
}

struct State {
    members: Vec<u32>,
    /// index into `candidates[i]`
    specials: Vec<Option<usize>>,
}

impl<'a> Ctx<'a> {
    fn new(th: &'a NormalTheory) -> Result<Self, SolverError> {
        let mut uses_u = vec![false; th.signature.unary.len()];
        let mut uses_b = vec![false; th.signature.binary.len()];
        let mut mark = |l: &Lit| match l.atom {
            Atom::X(p) | Atom::Y(p) => uses_u[p] = true,
            Atom::XY(r) | Atom::YX(r) => uses_b[r] = true,
        };
        th.unary_clauses.iter().flat_map(|c| &c.lits).for_each(&mut mark);
        th.guard_clauses.iter().flat_map(|c| &c.lits).for_each(&mut mark);
        for w in &th.witness_requirements {
            w.guard.iter().chain(&w.body).for_each(&mut mark);
        }
        for r in &th.realizers {
            r.lits.iter().for_each(&mut mark);
            r.obligations.iter().flatten().for_each(&mut mark);
            r.witnesses.iter().flatten().for_each(&mut mark);
        }
        let index = |uses: &[bool]| {
            let mut k = 0;
            uses.iter()
                .map(|&u| {
                    u.then(|| {
                        k += 1;
                        k - 1
                    })
                })
                .collect::<Vec<_>>()
        };
        let upos = index(&uses_u);
        let bpos = index(&uses_b);
        let n1 = uses_u.iter().filter(|u| **u).count();
        let n2 = uses_b.iter().filter(|u| **u).count();
        if n1 > MAX_UNARY || n2 > MAX_BINARY {
            return Err(SolverError::ResourceLimit(format!(
                "{n1} unary and {n2} binary predicates exceed the type-search limits"
            )));
        }
        let mut clauses: Vec<Clause> =
            th.guard_clauses.iter().filter_map(|c| Clause::compile(&c.lits, &upos, &bpos)).collect();
        let guard_count = clauses.len();
        let mut obligations = Vec::new();
        let mut group = Vec::new();
        let mut seen: HashMap<Vec<[u64; 6]>, u32> = HashMap::new();
        for (i, r) in th.realizers.iter().enumerate() {
            let start = clauses.len();
            let mut own: Vec<Clause> = r.obligations.iter().filter_map(|o| Clause::compile(o, &upos, &bpos)).collect();
            let mut key: Vec<[u64; 6]> = own
                .iter()
                .map(|c| [c.xmask as u64, c.xfalse as u64, c.ymask as u64, c.yfalse as u64, c.pos, c.neg])
                .collect();
            key.sort_unstable();
            key.dedup();
            if key.is_empty() {
                group.push(NO_REALIZER);
            } else if let Some(&g) = seen.get(&key) {
                group.push(g);
                own.clear();
            } else {
                seen.insert(key, i as u32);
                group.push(i as u32);
            }
            clauses.extend(own);
            obligations.push((start..clauses.len()).collect());
        }
        let requirement_bodies = th.witness_requirements.iter().map(|w| Conj::compile(&w.body, &upos, &bpos)).collect();
        let oneshot_bodies =
            th.realizers.iter().map(|r| r.witnesses.iter().map(|w| Conj::compile(w, &upos, &bpos)).collect()).collect();
        let unary: Vec<Clause> =
            th.unary_clauses.iter().filter_map(|c| Clause::compile(&c.lits, &upos, &bpos)).collect();
        let guards: Vec<Conj> = th.witness_requirements.iter().map(|w| Conj::compile(&w.guard, &upos, &bpos)).collect();
        let mut ctx = Ctx {
            th,
            upos,
            bpos,
            types: Vec::new(),
            clauses,
            guard_count,
            obligations,
            group,
            requirement_bodies,
            oneshot_bodies,
            class_active: Vec::new(),
            scopes: Vec::new(),
            scratch: Vec::new(),
            open_memo: FxHashMap::default(),
            class_members: Vec::new(),
            candidates: Vec::new(),
            cores: FxHashMap::default(),
        };
        let words = ctx.clauses.len().div_ceil(64);
        let mask_of = |idx: &mut dyn Iterator<Item = usize>| {
            let mut m = vec![0u64; words];
            for j in idx {
                m[j / 64] |= 1 << (j % 64);
            }
            m
        };
        ctx.scopes.push(mask_of(&mut (0..guard_count)));
        for o in &ctx.obligations {
            ctx.scopes.push(mask_of(&mut (0..guard_count).chain(o.iter().copied())));
        }
        let mut class_of: HashMap<(Vec<u64>, Vec<u64>), u32> = HashMap::new();
        for bits in 0..(1u32 << n1) {
            // unary clauses have no y part, so "active" means falsified
            if unary.iter().any(|c| bits & c.xmask == c.xfalse) {
                continue;
            }
            let Some(diag) = ctx.diagonal(bits, None) else { continue };
            let requirements = guards
                .iter()
                .enumerate()
                .filter(|(_, g)| bits & g.xmask == g.xval && g.pos & g.neg == 0)
                .map(|(k, _)| k as u32)
                .collect();
            let mut key = (vec![0u64; words], vec![0u64; words]);
            for (j, c) in ctx.clauses.iter().enumerate() {
                if bits & c.xmask == c.xfalse {
                    key.0[j / 64] |= 1 << (j % 64);
                }
                if bits & c.ymask == c.yfalse {
                    key.1[j / 64] |= 1 << (j % 64);
                }
            }
            let t = ctx.types.len() as u32;
            let class = *class_of.entry(key).or_insert_with_key(|key| {
                ctx.class_active.push(key.clone());
                ctx.class_members.push(Vec::new());
                ctx.class_active.len() as u32 - 1
            });
            ctx.class_members[class as usize].push(t);
            ctx.types.push(TypeInfo { bits, diag, class, requirements });
        }
        for (i, r) in th.realizers.iter().enumerate() {
            let lits = Conj::compile(&r.lits, &ctx.upos, &ctx.bpos);
            let cands = (0..ctx.types.len() as u32)
                .filter_map(|t| {
                    let bits = ctx.types[t as usize].bits;
                    if bits & lits.xmask != lits.xval || lits.pos & lits.neg != 0 {
                        return None;
                    }
                    ctx.diagonal(bits, Some(i)).map(|d| (t, d))
                })
                .collect();
            ctx.candidates.push(cands);
        }
        Ok(ctx)
    }

    /// Diagonal bits making the guard clauses (and the realizer's
    /// obligations) true at `x = y`.
    fn diagonal(&self, bits: u32, realizer: Option<usize>) -> Option<u64> {
        let obligations: &[usize] = match realizer.map(|i| self.group[i]) {
            Some(g) if g != NO_REALIZER => &self.obligations[g as usize],
            _ => &[],
        };
        let mut buf = Vec::new();
        for c in self.clauses[..self.guard_count].iter().chain(obligations.iter().map(|&j| &self.clauses[j])) {
            if let Some(d) = c.diagonal(bits) {
                if d == (0, 0) {
                    return None;
                }
                buf.push(d);
            }
        }
        small_sat(&buf, 0, 0)
    }

    fn body(&self, body: Body) -> Option<&Conj> {
        match body {
            Body::None => None,
            Body::Requirement(k) => Some(&self.requirement_bodies[k as usize]),
            Body::OneShot(i, w) => Some(&self.oneshot_bodies[i as usize][w as usize]),
        }
    }

    /// Link bits between `a` and `b` (bit `2r` is `r(a,b)`, bit `2r+1` is
    /// `r(b,a)`), or `None` when no admissible link exists.
    fn link(&mut self, a: End, b: End, body: Body) -> Option<u64> {
        let ua = self.types[a.0 as usize].bits;
        let ub = self.types[b.0 as usize].bits;
        if let Some(w) = self.body(body) {
            if ua & w.xmask != w.xval || ub & w.ymask != w.yval {
                return None;
            }
        }
        let ca = self.types[a.0 as usize].class;
        let cb = self.types[b.0 as usize].class;
        let (ga, gb) = (self.group_of(a.1), self.group_of(b.1));
        self.core(ca, ga, cb, gb, body)
    }

    fn group_of(&self, realizer: u32) -> u32 {
        if realizer == NO_REALIZER {
            NO_REALIZER
        } else {
            self.group[realizer as usize]
        }
    }

    /// Link feasibility between classes (realizers given by group),
    /// ignoring unary conditions of the
    /// body (which are not class invariants).
    fn core(&mut self, ca: u32, ra: u32, cb: u32, rb: u32, body: Body) -> Option<u64> {
        let key = (ca, ra, cb, rb, body);
        if let Some(hit) = self.cores.get(&key) {
            return *hit;
        }
        let result = self.compute_core(ca, ra, cb, rb, body);
        self.cores.insert(key, result);
        result
    }

    fn compute_core(&mut self, ca: u32, ra: u32, cb: u32, rb: u32, body: Body) -> Option<u64> {
        let (t, f) = self.body(body).map_or((0, 0), |w| (w.pos, w.neg));
        if t & f != 0 {
            return None;
        }
        if self.class_active[ca as usize].0.len() == 1 {
            // common case: at most 64 clauses, memoized by the open sets
            let (xa, ya) = (self.class_active[ca as usize].0[0], self.class_active[ca as usize].1[0]);
            let (xb, yb) = (self.class_active[cb as usize].0[0], self.class_active[cb as usize].1[0]);
            let fwd = xa & yb & self.scope(ra)[0];
            let bwd = xb & ya & self.scope(rb)[0];
            if fwd | bwd == 0 {
                return Some(t);
            }
            let key = (fwd, bwd, t, f);
            if let Some(hit) = self.open_memo.get(&key) {
                return *hit;
            }
            let mut buf = std::mem::take(&mut self.scratch);
            buf.clear();
            let result = self.collect_open(ca, ra, cb, rb, &mut buf).and_then(|()| small_sat(&buf, t, f));
            self.scratch = buf;
            self.open_memo.insert(key, result);
            return result;
        }
        let mut buf = std::mem::take(&mut self.scratch);
        buf.clear();
        let result = self.collect_open(ca, ra, cb, rb, &mut buf).and_then(|()| small_sat(&buf, t, f));
        self.scratch = buf;
        result
    }

    fn scope(&self, group: u32) -> &[u64] {
        if group == NO_REALIZER {
            &self.scopes[0]
        } else {
            &self.scopes[group as usize + 1]
        }
    }

    /// Residual link clauses between classes `ca` and `cb`; `None` if one
    /// is already falsified.
    fn collect_open(&self, ca: u32, ra: u32, cb: u32, rb: u32, buf: &mut Vec<(u64, u64)>) -> Option<()> {
        let (xa, ya) = &self.class_active[ca as usize];
        let (xb, yb) = &self.class_active[cb as usize];
        let (sa, sb) = (self.scope(ra), self.scope(rb));
        for w in 0..xa.len() {
            let mut fwd = xa[w] & yb[w] & sa[w];
            while fwd != 0 {
                let c = &self.clauses[64 * w + fwd.trailing_zeros() as usize];
                fwd &= fwd - 1;
                if c.pos | c.neg == 0 {
                    return None;
                }
                buf.push((c.pos, c.neg));
            }
            let mut bwd = xb[w] & ya[w] & sb[w];
            while bwd != 0 {
                let c = &self.clauses[64 * w + bwd.trailing_zeros() as usize];
                bwd &= bwd - 1;
                if c.pos | c.neg == 0 {
                    return None;
                }
                buf.push((swap_pairs(c.pos), swap_pairs(c.neg)));
            }
        }
        Some(())
    }

    fn pool(t: u32) -> End {
        (t, NO_REALIZER)
    }

    fn special_end(&self, st: &State, i: usize) -> Option<(End, u64)> {
        st.specials[i].map(|c| {
            let (t, d) = self.candidates[i][c];
            ((t, i as u32), d)
        })
    }

    /// Demands of a special element of type `t` for realizer `i`.
    fn special_demands(&self, t: u32, i: usize) -> Vec<Body> {
        let mut out: Vec<Body> = self.types[t as usize].requirements.iter().map(|&k| Body::Requirement(k)).collect();
        out.extend((0..self.th.realizers[i].witnesses.len()).map(|w| Body::OneShot(i as u32, w as u32)));
        out
    }

    /// Index into `table.lists` of the pool types able to serve `body` for
    /// an element `from`; `None` when the body's conditions on `from` fail.
    fn servers(&mut self, from: End, body: Body, table: &mut Servers) -> Option<usize> {
        let info = &self.types[from.0 as usize];
        let (bits, class) = (info.bits, info.class);
        let w = self.body(body).copied();
        if w.is_some_and(|w| bits & w.xmask != w.xval) {
            return None;
        }
        let g = self.group_of(from.1);
        let (xa, ya) = &self.class_active[class as usize];
        // only clauses in scope matter, so classes differing elsewhere share
        let key = if xa.len() == 1 {
            (xa[0] & self.scope(g)[0], ya[0] & self.scopes[0][0], u32::MAX, body)
        } else {
            (u64::from(class), u64::from(g), 0, body)
        };
        if let Some(&hit) = table.index.get(&key) {
            return Some(hit);
        }
        let mut out = Vec::new();
        for c in 0..self.class_members.len() as u32 {
            // each key is met once here, so skip the memo
            if self.compute_core(class, g, c, NO_REALIZER, body).is_none() {
                continue;
            }
            out.extend(
                self.class_members[c as usize]
                    .iter()
                    .copied()
                    .filter(|&v| w.is_none_or(|w| self.types[v as usize].bits & w.ymask == w.yval)),
            );
        }
        table.lists.push(out);
        table.index.insert(key, table.lists.len() - 1);
        Some(table.lists.len() - 1)
    }
}

/// Server lists shared by all demands with the same class, group and body.
#[derive(Default)]
struct Servers {
    index: FxHashMap<(u64, u64, u32, Body), usize>,
    lists: Vec<Vec<u32>>,
}

impl Servers {
    fn served(&self, list: Option<usize>, keep: &[bool]) -> bool {
        list.is_some_and(|l| self.lists[l].iter().any(|&w| keep[w as usize]))
    }
}

/// Propositional encoding of the certificate conditions.
struct Encoding {
    cnf: CnfFormula,
    /// `sp[i][c]`: variable of candidate `c` of realizer `i`
    sp: Vec<Vec<i32>>,
    /// `spc[i]`: class of the special of realizer `i` → variable
    spc: Vec<HashMap<u32, i32>>,
    /// requirements of pool types: (type, server list)
    demands: Vec<(u32, Option<usize>)>,
    table: Servers,
}

fn encode(ctx: &mut Ctx) -> Option<Encoding> {
    if ctx.candidates.iter().any(Vec::is_empty) {
        return None;
    }
    let nt = ctx.types.len();
    let nc = ctx.class_members.len();
    let in_var = |v: u32| v as i32 + 1;
    let cu_var = |c: u32| (nt + c as usize) as i32 + 1;
    let mut next = (nt + nc) as i32;
    let mut fresh = || {
        next += 1;
        next
    };
    let mut clauses: Vec<Vec<i32>> = Vec::new();
    for v in 0..nt as u32 {
        clauses.push(vec![-in_var(v), cu_var(ctx.types[v as usize].class)]);
    }
    for c1 in 0..nc as u32 {
        // same-class pairs are always linkable by cloning the diagonal
        for c2 in c1 + 1..nc as u32 {
            if ctx.compute_core(c1, NO_REALIZER, c2, NO_REALIZER, Body::None).is_none() {
                clauses.push(vec![-cu_var(c1), -cu_var(c2)]);
            }
        }
    }
    // one variable per server list, implying that some server is present
    let mut table = Servers::default();
    let mut list_var: Vec<i32> = Vec::new();
    let mut guarded: Vec<Vec<i32>> = Vec::new();
    let mut demand = |ctx: &mut Ctx, from: End, body: Body, guard: i32, fresh: &mut dyn FnMut() -> i32| {
        let list = ctx.servers(from, body, &mut table);
        while list_var.len() < table.lists.len() {
            list_var.push(fresh());
        }
        match list {
            Some(l) => guarded.push(vec![-guard, list_var[l]]),
            None => guarded.push(vec![-guard]),
        }
        list
    };
    let mut demands = Vec::new();
    for v in 0..nt as u32 {
        for k in ctx.types[v as usize].requirements.clone() {
            let list = demand(ctx, Ctx::pool(v), Body::Requirement(k), in_var(v), &mut fresh);
            demands.push((v, list));
        }
    }
    let r = ctx.th.realizers.len();
    let mut sp = Vec::with_capacity(r);
    // per realizer: class → class-level special variable
    let mut spc: Vec<HashMap<u32, i32>> = Vec::with_capacity(r);
    for i in 0..r {
        let mut vars = Vec::new();
        let mut by_class: HashMap<u32, i32> = HashMap::new();
        for c in 0..ctx.candidates[i].len() {
            let (t, _) = ctx.candidates[i][c];
            let s = fresh();
            vars.push(s);
            let class = ctx.types[t as usize].class;
            let sc = *by_class.entry(class).or_insert_with(&mut fresh);
            for body in ctx.special_demands(t, i) {
                demand(ctx, (t, i as u32), body, s, &mut fresh);
            }
            clauses.push(vec![-s, sc]);
        }
        clauses.push(vars.clone());
        sp.push(vars);
        spc.push(by_class);
    }
    if r == 0 {
        clauses.push((0..nt as u32).map(in_var).collect());
    }
    clauses.append(&mut guarded);
    for (l, &d) in list_var.iter().enumerate() {
        let mut clause = vec![-d];
        clause.extend(table.lists[l].iter().map(|&w| in_var(w)));
        clauses.push(clause);
    }
    let mut cnf = CnfFormula::new(next as usize);
    for c in clauses {
        cnf.add_clause(c);
    }
    Some(Encoding { cnf, sp, spc, demands, table })
}

/// Greedily drops pool types whose demands-serving role is covered by the
/// rest, keeping the certificate small.
fn prune(ctx: &mut Ctx, st: &mut State, enc: &mut Encoding) {
    let mut special_demands = Vec::new();
    for i in 0..st.specials.len() {
        if let Some((end, _)) = ctx.special_end(st, i) {
            for body in ctx.special_demands(end.0, i) {
                special_demands.push(ctx.servers(end, body, &mut enc.table));
            }
        }
    }
    let mut keep = vec![false; ctx.types.len()];
    for &v in &st.members {
        keep[v as usize] = true;
    }
    let mut left = st.members.len();
    for &v in st.members.iter().rev() {
        if st.specials.is_empty() && left == 1 {
            // the domain must not become empty
            break;
        }
        keep[v as usize] = false;
        let ok = enc.demands.iter().all(|&(o, list)| !keep[o as usize] || enc.table.served(list, &keep))
            && special_demands.iter().all(|&list| enc.table.served(list, &keep));
        if ok {
            left -= 1;
        } else {
            keep[v as usize] = true;
        }
    }
    st.members.retain(|&v| keep[v as usize]);
}

impl Ctx<'_> {
    fn certificate(&mut self, st: &State) -> Result<ModelCertificate, SolverError> {
        let internal = |what: &str| SolverError::Internal(format!("certificate construction: {what}"));
        let mut members = st.members.clone();
        members.sort_unstable();
        let r = st.specials.len();
        let specials: Vec<(End, u64)> = (0..r)
            .map(|i| self.special_end(st, i).ok_or_else(|| internal("unassigned realizer")))
            .collect::<Result<_, _>>()?;
        // requirement ranks among those applicable somewhere in T
        let mut applicable: Vec<u32> =
            members.iter().flat_map(|&t| self.types[t as usize].requirements.iter().copied()).collect();
        applicable.sort_unstable();
        applicable.dedup();
        let rank: HashMap<u32, usize> = applicable.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        let special_demands: Vec<Vec<Body>> = (0..r).map(|i| self.special_demands(specials[i].0 .0, i)).collect();
        let groups = (2 * applicable.len() + 1).max(special_demands.iter().map(Vec::len).max().unwrap_or(0));
        let width = members.len();
        let size = r + groups * width;
        let pos: HashMap<u32, usize> = members.iter().enumerate().map(|(i, &t)| (t, i)).collect();
        let pool_elem = |g: usize, t: u32| r + g * width + pos[&t];
        let elem_type = |e: usize| -> (End, u64) {
            if e < r {
                specials[e]
            } else {
                let t = members[(e - r) % width];
                (Self::pool(t), 0)
            }
        };

        let mut s = Structure::new(size, self.th.signature.clone());
        let urel: Vec<(usize, usize)> = self.upos.iter().enumerate().filter_map(|(p, i)| i.map(|i| (p, i))).collect();
        let brel: Vec<(usize, usize)> = self.bpos.iter().enumerate().filter_map(|(r, i)| i.map(|i| (r, i))).collect();
        for e in 0..size {
            let (end, special_diag) = elem_type(e);
            let info = &self.types[end.0 as usize];
            let diag = if e < r { special_diag } else { info.diag };
            for &(p, i) in &urel {
                s.set_unary(p, e, info.bits >> i & 1 == 1);
            }
            for &(rp, i) in &brel {
                s.set_binary(rp, e, e, diag >> i & 1 == 1);
            }
        }
        let mut set = vec![false; size * size];
        let put = |s: &mut Structure, set: &mut [bool], a: usize, b: usize, bits: u64| {
            for &(rp, i) in &brel {
                s.set_binary(rp, a, b, bits >> (2 * i) & 1 == 1);
                s.set_binary(rp, b, a, bits >> (2 * i + 1) & 1 == 1);
            }
            let fresh = !set[a * size + b];
            set[a * size + b] = true;
            set[b * size + a] = true;
            fresh
        };
        let mut witnesses = Vec::new();
        let target = |ctx: &mut Self, from: End, body: Body| -> Result<(u32, u64), SolverError> {
            members
                .iter()
                .find_map(|&v| ctx.link(from, Self::pool(v), body).map(|bits| (v, bits)))
                .ok_or_else(|| internal("unserved demand"))
        };
        for g in 0..groups {
            for &t in &members {
                for k in self.types[t as usize].requirements.clone() {
                    let (v, bits) = target(self, Self::pool(t), Body::Requirement(k))?;
                    let a = pool_elem(g, t);
                    let b = pool_elem((g + rank[&k] + 1) % groups, v);
                    if !put(&mut s, &mut set, a, b, bits) {
                        return Err(internal("conflicting witness links"));
                    }
                    witnesses.push(WitnessEdge { element: a, demand: Demand::Requirement(k as usize), witness: b });
                }
            }
        }
        for (i, demands) in special_demands.iter().enumerate() {
            for (d, &body) in demands.iter().enumerate() {
                let (v, bits) = target(self, specials[i].0, body)?;
                let b = pool_elem(d, v);
                if !put(&mut s, &mut set, i, b, bits) {
                    return Err(internal("conflicting witness links"));
                }
                let demand = match body {
                    Body::Requirement(k) => Demand::Requirement(k as usize),
                    Body::OneShot(i, w) => Demand::OneShot(i as usize, w as usize),
                    Body::None => unreachable!(),
                };
                witnesses.push(WitnessEdge { element: i, demand, witness: b });
            }
        }
        for a in 0..size {
            for b in a + 1..size {
                if set[a * size + b] {
                    continue;
                }
                let (ea, _) = elem_type(a);
                let (eb, _) = elem_type(b);
                let bits = if a >= r && ea.0 == eb.0 {
                    // clone of the same type: copy the loop in both directions
                    let diag = self.types[ea.0 as usize].diag;
                    brel.iter().fold(0u64, |m, &(_, i)| {
                        let v = diag >> i & 1;
                        m | v << (2 * i) | v << (2 * i + 1)
                    })
                } else {
                    self.link(ea, eb, Body::None).ok_or_else(|| internal("missing pair link"))?
                };
                put(&mut s, &mut set, a, b, bits);
            }
        }
        Ok(ModelCertificate { structure: s, realizers: (0..r).collect(), witnesses })
    }
}

/// Searches for a certificate. Returns the outcome and the number of
/// decisions made by the propositional search.
pub(crate) fn search(theory: &NormalTheory, budget: Budget) -> Result<(Search, u64), SolverError> {
    let mut ctx = Ctx::new(theory)?;
    let enc = encode(&mut ctx);
    let Some(mut enc) = enc else {
        return Ok((Search::Unsat, 0));
    };
    let nt = ctx.types.len();
    let mut decisions = 0;
    let mut done_pool = std::collections::HashSet::new();
    let mut done_pair = std::collections::HashSet::new();
    // Exclusions involving specials are numerous but rarely matter; they
    // are added only once a model violates them.
    loop {
        let options = CnfOptions {
            engine: Engine::Cdcl,
            decision_budget: Some(budget.nodes.saturating_sub(decisions)),
            deadline: budget.deadline,
            ..CnfOptions::default()
        };
        let (result, stats) = cnf_sat_with(&enc.cnf, &[], &options);
        decisions += stats.decisions;
        let a = match result {
            CnfResult::Unsat => return Ok((Search::Unsat, decisions)),
            CnfResult::Unknown => return Ok((Search::Timeout, decisions)),
            CnfResult::Sat(a) => a,
        };
        let members = (0..nt as u32).filter(|&v| a[v as usize]).collect();
        let specials = enc.sp.iter().map(|vars| vars.iter().position(|&s| a[s as usize - 1])).collect();
        let mut st = State { members, specials };
        prune(&mut ctx, &mut st, &mut enc);
        let mut classes: Vec<u32> = st.members.iter().map(|&v| ctx.types[v as usize].class).collect();
        classes.sort_unstable();
        classes.dedup();
        let chosen: Vec<(u32, u32, i32)> = (0..st.specials.len())
            .map(|i| {
                let ((t, _), _) = ctx.special_end(&st, i).expect("every realizer has a special");
                let class = ctx.types[t as usize].class;
                (class, ctx.group[i], enc.spc[i][&class])
            })
            .collect();
        // a violation triggers the whole family of exclusions it belongs to
        let mut violated = Vec::new();
        for (i, &(ci, gi, _)) in chosen.iter().enumerate() {
            for &c in &classes {
                if !done_pool.contains(&c) && ctx.core(ci, gi, c, NO_REALIZER, Body::None).is_none() {
                    done_pool.insert(c);
                    for (i2, map) in enc.spc.iter().enumerate() {
                        for (&x, &sx) in map {
                            if ctx.core(x, ctx.group[i2], c, NO_REALIZER, Body::None).is_none() {
                                violated.push(vec![-sx, -((nt + c as usize) as i32 + 1)]);
                            }
                        }
                    }
                }
            }
            for (j, &(cj, gj, _)) in chosen.iter().enumerate().skip(i + 1) {
                if !done_pair.contains(&(i, j)) && ctx.core(ci, gi, cj, gj, Body::None).is_none() {
                    done_pair.insert((i, j));
                    for (&x, &sx) in &enc.spc[i] {
                        for (&y, &sy) in &enc.spc[j] {
                            if ctx.core(x, gi, y, gj, Body::None).is_none() {
                                violated.push(vec![-sx, -sy]);
                            }
                        }
                    }
                }
            }
        }
        if violated.is_empty() {
            return Ok((Search::Found(ctx.certificate(&st)?), decisions));
        }
        for c in violated {
            enc.cnf.add_clause(c);
        }
    }
}
