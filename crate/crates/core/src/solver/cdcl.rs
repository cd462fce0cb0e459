//! Conflict-driven clause learning: first-UIP learning, activity-ordered
//! branching with phase saving, and Luby restarts. Fully deterministic.

use std::time::Instant;

use super::cnf::{CnfFormula, CnfOptions, CnfResult, CnfStats};

const UNASSIGNED: u8 = 2;
const NO_REASON: u32 = u32::MAX;

/// Max-heap of variables by activity, lowest index first on ties.
struct Order {
    heap: Vec<u32>,
    pos: Vec<usize>,
}

const ABSENT: usize = usize::MAX;

impl Order {
    fn above(act: &[f64], a: u32, b: u32) -> bool {
        let (x, y) = (act[a as usize], act[b as usize]);
        x > y || (x == y && a < b)
    }

    fn contains(&self, v: u32) -> bool {
        self.pos[v as usize] != ABSENT
    }

    fn up(&mut self, act: &[f64], mut i: usize) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if !Self::above(act, v, self.heap[parent]) {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.pos[self.heap[i] as usize] = i;
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i;
    }

    fn down(&mut self, act: &[f64], mut i: usize) {
        let v = self.heap[i];
        loop {
            let mut child = 2 * i + 1;
            if child >= self.heap.len() {
                break;
            }
            if child + 1 < self.heap.len() && Self::above(act, self.heap[child + 1], self.heap[child]) {
                child += 1;
            }
            if !Self::above(act, self.heap[child], v) {
                break;
            }
            self.heap[i] = self.heap[child];
            self.pos[self.heap[i] as usize] = i;
            i = child;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i;
    }

    fn insert(&mut self, act: &[f64], v: u32) {
        if !self.contains(v) {
            self.heap.push(v);
            self.up(act, self.heap.len() - 1);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<u32> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().expect("non-empty");
        self.pos[top as usize] = ABSENT;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.down(act, 0);
        }
        Some(top)
    }
}

struct Solver<'a> {
    clauses: Vec<Vec<u32>>,
    watches: Vec<Vec<u32>>,
    value: Vec<u8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail: Vec<u32>,
    trail_lim: Vec<usize>,
    head: usize,
    activity: Vec<f64>,
    inc: f64,
    order: Order,
    phase: Vec<bool>,
    seen: Vec<bool>,
    stats: CnfStats,
    options: &'a CnfOptions,
}

fn luby(mut i: u64) -> u64 {
    // i-th element (0-based) of 1 1 2 1 1 2 4 ...
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < i + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != i {
        size = (size - 1) >> 1;
        seq -= 1;
        i %= size;
    }
    1 << seq
}

impl Solver<'_> {
    #[inline]
    fn lit_value(&self, lit: u32) -> u8 {
        let v = self.value[(lit >> 1) as usize];
        if v == UNASSIGNED {
            UNASSIGNED
        } else {
            v ^ (lit & 1) as u8
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn assign(&mut self, lit: u32, reason: u32) {
        let v = (lit >> 1) as usize;
        self.value[v] = 1 ^ (lit & 1) as u8;
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(lit);
    }

    /// Returns the index of a conflicting clause, if any.
    fn propagate(&mut self) -> Option<u32> {
        while self.head < self.trail.len() {
            let lit = self.trail[self.head];
            self.head += 1;
            self.stats.propagations += 1;
            let false_lit = lit ^ 1;
            let mut ws = std::mem::take(&mut self.watches[false_lit as usize]);
            let mut i = 0;
            let mut conflict = None;
            while i < ws.len() {
                let ci = ws[i];
                let clause = &mut self.clauses[ci as usize];
                if clause[0] == false_lit {
                    clause.swap(0, 1);
                }
                let first = clause[0];
                let val = |l: u32| {
                    let v = self.value[(l >> 1) as usize];
                    if v == UNASSIGNED {
                        UNASSIGNED
                    } else {
                        v ^ (l & 1) as u8
                    }
                };
                if val(first) == 1 {
                    i += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..clause.len() {
                    if val(clause[k]) != 0 {
                        clause.swap(1, k);
                        let w = clause[1];
                        self.watches[w as usize].push(ci);
                        ws.swap_remove(i);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                if val(first) == 0 {
                    conflict = Some(ci);
                    break;
                }
                self.assign(first, ci);
                i += 1;
            }
            self.watches[false_lit as usize] = ws;
            if conflict.is_some() {
                self.stats.conflicts += 1;
                return conflict;
            }
        }
        None
    }

    fn bump(&mut self, v: usize) {
        self.activity[v] += self.inc;
        if self.activity[v] > 1e100 {
            // uniform rescaling keeps the heap order
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.inc *= 1e-100;
        }
        if self.order.contains(v as u32) {
            self.order.up(&self.activity, self.order.pos[v]);
        }
    }

    /// First-UIP clause and the level to backjump to.
    fn analyze(&mut self, mut confl: u32) -> (Vec<u32>, u32) {
        let mut learnt = vec![0u32];
        let mut pending = 0;
        let mut idx = self.trail.len();
        let mut p: Option<u32> = None;
        let current = self.decision_level();
        loop {
            let clause = self.clauses[confl as usize].clone();
            let start = usize::from(p.is_some());
            for &q in &clause[start..] {
                let v = (q >> 1) as usize;
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump(v);
                    if self.level[v] == current {
                        pending += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[(self.trail[idx] >> 1) as usize] {
                    break;
                }
            }
            let lit = self.trail[idx];
            let v = (lit >> 1) as usize;
            self.seen[v] = false;
            pending -= 1;
            if pending == 0 {
                learnt[0] = lit ^ 1;
                break;
            }
            p = Some(lit);
            confl = self.reason[v];
        }
        for &q in &learnt[1..] {
            self.seen[(q >> 1) as usize] = false;
        }
        let mut back = 0;
        if learnt.len() > 1 {
            let mut best = 1;
            for k in 2..learnt.len() {
                if self.level[(learnt[k] >> 1) as usize] > self.level[(learnt[best] >> 1) as usize] {
                    best = k;
                }
            }
            learnt.swap(1, best);
            back = self.level[(learnt[1] >> 1) as usize];
        }
        (learnt, back)
    }

    fn backtrack(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let keep = self.trail_lim[level as usize];
        for &lit in &self.trail[keep..] {
            let v = (lit >> 1) as usize;
            self.phase[v] = lit & 1 == 0;
            self.value[v] = UNASSIGNED;
            self.reason[v] = NO_REASON;
            self.order.insert(&self.activity, v as u32);
        }
        self.trail.truncate(keep);
        self.trail_lim.truncate(level as usize);
        self.head = keep;
    }

    /// Unassigned variable of highest activity, lowest index on ties.
    fn pick(&mut self) -> Option<usize> {
        while let Some(v) = self.order.pop(&self.activity) {
            if self.value[v as usize] == UNASSIGNED {
                return Some(v as usize);
            }
        }
        None
    }

    fn add_learnt(&mut self, learnt: Vec<u32>) {
        let asserting = learnt[0];
        if learnt.len() == 1 {
            self.assign(asserting, NO_REASON);
            return;
        }
        let ci = self.clauses.len() as u32;
        self.watches[learnt[0] as usize].push(ci);
        self.watches[learnt[1] as usize].push(ci);
        self.clauses.push(learnt);
        self.assign(asserting, ci);
    }
}

/// CDCL counterpart of [`super::cnf_sat_with`]; the decision budget and
/// deadline are honored the same way.
pub(crate) fn cdcl_sat(f: &CnfFormula, assumptions: &[i32], options: &CnfOptions) -> (CnfResult, CnfStats) {
    let n = f.num_vars;
    let mut s = Solver {
        clauses: Vec::with_capacity(f.clauses.len()),
        watches: vec![Vec::new(); 2 * n],
        value: vec![UNASSIGNED; n],
        level: vec![0; n],
        reason: vec![NO_REASON; n],
        trail: Vec::with_capacity(n),
        trail_lim: Vec::new(),
        head: 0,
        activity: vec![0.0; n],
        inc: 1.0,
        order: Order { heap: (0..n as u32).collect(), pos: (0..n).collect() },
        phase: vec![false; n],
        seen: vec![false; n],
        stats: CnfStats::default(),
        options,
    };
    let lit_of = |l: i32| {
        let v = l.unsigned_abs() - 1;
        2 * v + u32::from(l < 0)
    };
    let mut units = Vec::new();
    for clause in &f.clauses {
        let mut lits: Vec<u32> = clause.iter().map(|&l| lit_of(l)).collect();
        lits.sort_unstable();
        lits.dedup();
        if lits.windows(2).any(|w| w[0] ^ 1 == w[1]) {
            continue;
        }
        match lits.len() {
            0 => return (CnfResult::Unsat, s.stats),
            1 => units.push(lits[0]),
            _ => {
                let ci = s.clauses.len() as u32;
                s.watches[lits[0] as usize].push(ci);
                s.watches[lits[1] as usize].push(ci);
                s.clauses.push(lits);
            }
        }
    }
    for lit in assumptions.iter().map(|&l| lit_of(l)).chain(units) {
        match s.lit_value(lit) {
            0 => return (CnfResult::Unsat, s.stats),
            UNASSIGNED => s.assign(lit, NO_REASON),
            _ => {}
        }
    }
    let mut restart = 0u64;
    let mut conflicts_left = 100 * luby(restart);
    loop {
        if let Some(confl) = s.propagate() {
            if s.decision_level() == 0 {
                return (CnfResult::Unsat, s.stats);
            }
            let (learnt, back) = s.analyze(confl);
            s.backtrack(back);
            s.add_learnt(learnt);
            s.inc /= 0.95;
            conflicts_left = conflicts_left.saturating_sub(1);
            continue;
        }
        if conflicts_left == 0 {
            restart += 1;
            conflicts_left = 100 * luby(restart);
            s.backtrack(0);
            continue;
        }
        let Some(var) = s.pick() else {
            let assignment = s.value.iter().map(|&v| v == 1).collect();
            return (CnfResult::Sat(assignment), s.stats);
        };
        if s.options.decision_budget.is_some_and(|b| s.stats.decisions >= b) {
            return (CnfResult::Unknown, s.stats);
        }
        if let Some(deadline) = s.options.deadline {
            if s.stats.decisions.is_multiple_of(1024) && Instant::now() > deadline {
                return (CnfResult::Unknown, s.stats);
            }
        }
        s.stats.decisions += 1;
        s.trail_lim.push(s.trail.len());
        let lit = 2 * var as u32 + u32::from(!s.phase[var]);
        s.assign(lit, NO_REASON);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{cnf_sat_with, Engine};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn luby_sequence() {
        let seq: Vec<u64> = (0..15).map(luby).collect();
        assert_eq!(seq, vec![1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }

    #[test]
    fn agrees_with_dpll() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cdcl = CnfOptions { engine: Engine::Cdcl, ..CnfOptions::default() };
        for _ in 0..400 {
            let n = rng.random_range(1..=30usize);
            let m = rng.random_range(0..=6 * n);
            let mut f = CnfFormula::new(n);
            for _ in 0..m {
                let k = rng.random_range(1..=4);
                let c = (0..k)
                    .map(|_| {
                        let v = rng.random_range(1..=n as i32);
                        if rng.random_bool(0.5) {
                            v
                        } else {
                            -v
                        }
                    })
                    .collect();
                f.add_clause(c);
            }
            let a = cnf_sat_with(&f, &[], &CnfOptions::default()).0;
            let b = cnf_sat_with(&f, &[], &cdcl).0;
            assert_eq!(a.is_sat(), b.is_sat(), "{f:?}");
            if let CnfResult::Sat(x) = b {
                assert!(f.evaluate(&x));
            }
        }
    }

    #[test]
    fn pigeonhole_is_unsat() {
        // 6 pigeons, 5 holes
        let (p, h) = (6, 5);
        let var = |i: usize, j: usize| (i * h + j + 1) as i32;
        let mut f = CnfFormula::new(p * h);
        for i in 0..p {
            f.add_clause((0..h).map(|j| var(i, j)).collect());
        }
        for j in 0..h {
            for a in 0..p {
                for b in a + 1..p {
                    f.add_clause(vec![-var(a, j), -var(b, j)]);
                }
            }
        }
        let cdcl = CnfOptions { engine: Engine::Cdcl, ..CnfOptions::default() };
        assert_eq!(cnf_sat_with(&f, &[], &cdcl).0, CnfResult::Unsat);
        assert_eq!(cnf_sat_with(&f, &[-1], &cdcl).0, CnfResult::Unsat);
    }
}
