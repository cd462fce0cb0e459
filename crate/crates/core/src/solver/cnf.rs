//! Propositional CNF and a DPLL engine with two watched literals.

use std::time::Instant;

use serde::{Deserialize, Serialize};

/// Clauses over variables `1..=num_vars`, literals as signed integers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

impl CnfFormula {
    pub fn new(num_vars: usize) -> Self {
        CnfFormula { num_vars, clauses: Vec::new() }
    }

    pub fn add_clause(&mut self, clause: Vec<i32>) {
        debug_assert!(clause.iter().all(|l| *l != 0 && l.unsigned_abs() as usize <= self.num_vars));
        self.clauses.push(clause);
    }

    pub fn new_var(&mut self) -> i32 {
        self.num_vars += 1;
        self.num_vars as i32
    }

    /// Whether `assignment` (index `v - 1` for variable `v`) satisfies every clause.
    pub fn evaluate(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CnfResult {
    /// A total assignment, index `v - 1` for variable `v`.
    Sat(Vec<bool>),
    Unsat,
    /// The decision budget ran out.
    Unknown,
}

impl CnfResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, CnfResult::Sat(_))
    }
}

/// Variable selection at decision points.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branching {
    /// Lowest-index unassigned variable, positive phase first.
    #[default]
    Lowest,
    /// Unassigned variable with the most occurrences in currently
    /// unsatisfied shortest clauses (ties to the lowest index), positive
    /// phase first. Deterministic, but far fewer decisions on random k-CNF.
    ShortestClauses,
}

/// Search procedure behind [`cnf_sat_with`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Engine {
    /// Chronological backtracking with unit propagation.
    #[default]
    Dpll,
    /// Clause learning with non-chronological backjumping; `branching` is
    /// ignored.
    Cdcl,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CnfOptions {
    pub engine: Engine,
    pub branching: Branching,
    /// Maximum number of decisions; `None` is unbounded.
    pub decision_budget: Option<u64>,
    /// Wall-clock limit, checked every 1024 decisions.
    pub deadline: Option<Instant>,
}

impl Default for CnfOptions {
    fn default() -> Self {
        CnfOptions { engine: Engine::Dpll, branching: Branching::Lowest, decision_budget: None, deadline: None }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CnfStats {
    pub decisions: u64,
    pub propagations: u64,
    pub conflicts: u64,
}

const UNASSIGNED: u8 = 2;

#[inline]
fn lit_index(l: i32) -> usize {
    // variable v ≥ 1: positive 2(v-1), negative 2(v-1)+1
    let v = l.unsigned_abs() as usize - 1;
    2 * v + usize::from(l < 0)
}

struct Dpll<'a> {
    clauses: Vec<Vec<u32>>,
    watches: Vec<Vec<u32>>,
    /// per variable: 1 true, 0 false, 2 unassigned
    value: Vec<u8>,
    trail: Vec<u32>,
    head: usize,
    hint: usize,
    stats: CnfStats,
    options: &'a CnfOptions,
}

#[inline]
fn lit_value(value: &[u8], lit: u32) -> u8 {
    let v = value[(lit >> 1) as usize];
    if v == UNASSIGNED {
        UNASSIGNED
    } else {
        v ^ (lit & 1) as u8
    }
}

impl Dpll<'_> {
    #[inline]
    fn lit_value(&self, lit: u32) -> u8 {
        lit_value(&self.value, lit)
    }

    #[inline]
    fn assign(&mut self, lit: u32) {
        self.value[(lit >> 1) as usize] = 1 ^ (lit & 1) as u8;
        self.trail.push(lit);
    }

    /// Unit propagation from `head`; returns false on conflict.
    fn propagate(&mut self) -> bool {
        while self.head < self.trail.len() {
            let lit = self.trail[self.head];
            self.head += 1;
            self.stats.propagations += 1;
            let false_lit = lit ^ 1;
            let mut ws = std::mem::take(&mut self.watches[false_lit as usize]);
            let mut i = 0;
            let mut conflict = false;
            while i < ws.len() {
                let ci = ws[i] as usize;
                let value = &self.value;
                let clause = &mut self.clauses[ci];
                if clause[0] == false_lit {
                    clause.swap(0, 1);
                }
                let first = clause[0];
                if lit_value(value, first) == 1 {
                    i += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..clause.len() {
                    if lit_value(value, clause[k]) != 0 {
                        clause.swap(1, k);
                        self.watches[clause[1] as usize].push(ci as u32);
                        ws.swap_remove(i);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                match self.value_of(first) {
                    0 => {
                        conflict = true;
                        break;
                    }
                    UNASSIGNED => {
                        self.assign(first);
                    }
                    _ => {}
                }
                i += 1;
            }
            self.watches[false_lit as usize] = ws;
            if conflict {
                self.stats.conflicts += 1;
                return false;
            }
        }
        true
    }

    #[inline]
    fn value_of(&self, lit: u32) -> u8 {
        self.lit_value(lit)
    }

    fn undo_to(&mut self, len: usize) {
        while self.trail.len() > len {
            let lit = self.trail.pop().expect("non-empty trail");
            let v = (lit >> 1) as usize;
            self.value[v] = UNASSIGNED;
            self.hint = self.hint.min(v);
        }
        self.head = self.head.min(len);
    }

    fn pick(&mut self) -> Option<usize> {
        match self.options.branching {
            Branching::Lowest => {
                while self.hint < self.value.len() && self.value[self.hint] != UNASSIGNED {
                    self.hint += 1;
                }
                (self.hint < self.value.len()).then_some(self.hint)
            }
            Branching::ShortestClauses => {
                let mut best_len = usize::MAX;
                let mut counts: Vec<u32> = Vec::new();
                for c in &self.clauses {
                    if c.iter().any(|&l| self.lit_value(l) == 1) {
                        continue;
                    }
                    let free = c.iter().filter(|&&l| self.lit_value(l) == UNASSIGNED).count();
                    if free == 0 || free > best_len {
                        continue;
                    }
                    if free < best_len {
                        best_len = free;
                        counts.clear();
                        counts.resize(self.value.len(), 0);
                    }
                    for &l in c {
                        if self.lit_value(l) == UNASSIGNED {
                            counts[(l >> 1) as usize] += 1;
                        }
                    }
                }
                if counts.is_empty() {
                    // every clause satisfied: fill the rest in index order
                    return self.value.iter().position(|&v| v == UNASSIGNED);
                }
                let mut best = None;
                let mut best_count = 0;
                for (v, &c) in counts.iter().enumerate() {
                    if c > best_count {
                        best_count = c;
                        best = Some(v);
                    }
                }
                best.or_else(|| self.value.iter().position(|&v| v == UNASSIGNED))
            }
        }
    }
}

/// Decides `f` under `assumptions` (literals forced true before search).
pub fn cnf_sat(f: &CnfFormula, assumptions: &[i32]) -> CnfResult {
    cnf_sat_with(f, assumptions, &CnfOptions::default()).0
}

pub fn cnf_sat_with(f: &CnfFormula, assumptions: &[i32], options: &CnfOptions) -> (CnfResult, CnfStats) {
    if options.engine == Engine::Cdcl {
        return super::cdcl::cdcl_sat(f, assumptions, options);
    }
    let n = f.num_vars;
    let mut solver = Dpll {
        clauses: Vec::with_capacity(f.clauses.len()),
        watches: vec![Vec::new(); 2 * n],
        value: vec![UNASSIGNED; n],
        trail: Vec::with_capacity(n),
        head: 0,
        hint: 0,
        stats: CnfStats::default(),
        options,
    };
    let mut units: Vec<u32> = Vec::new();
    for clause in &f.clauses {
        let mut lits: Vec<u32> = clause.iter().map(|&l| lit_index(l) as u32).collect();
        lits.sort_unstable();
        lits.dedup();
        if lits.windows(2).any(|w| w[0] ^ 1 == w[1]) {
            continue; // tautology
        }
        match lits.len() {
            0 => return (CnfResult::Unsat, solver.stats),
            1 => units.push(lits[0]),
            _ => {
                let ci = solver.clauses.len() as u32;
                solver.watches[lits[0] as usize].push(ci);
                solver.watches[lits[1] as usize].push(ci);
                solver.clauses.push(lits);
            }
        }
    }
    for lit in assumptions.iter().map(|&l| lit_index(l) as u32).chain(units) {
        match solver.lit_value(lit) {
            0 => return (CnfResult::Unsat, solver.stats),
            UNASSIGNED => solver.assign(lit),
            _ => {}
        }
    }
    if !solver.propagate() {
        return (CnfResult::Unsat, solver.stats);
    }
    // (trail length before the decision, decided variable, negative phase tried)
    let mut decisions: Vec<(usize, usize, bool)> = Vec::new();
    loop {
        let Some(var) = solver.pick() else {
            let assignment = solver.value.iter().map(|&v| v == 1).collect();
            return (CnfResult::Sat(assignment), solver.stats);
        };
        if let Some(budget) = options.decision_budget {
            if solver.stats.decisions >= budget {
                return (CnfResult::Unknown, solver.stats);
            }
        }
        if let Some(deadline) = options.deadline {
            if solver.stats.decisions.is_multiple_of(1024) && Instant::now() > deadline {
                return (CnfResult::Unknown, solver.stats);
            }
        }
        solver.stats.decisions += 1;
        decisions.push((solver.trail.len(), var, false));
        solver.assign((2 * var) as u32);
        while !solver.propagate() {
            // chronological backtracking: flip the latest untried decision
            loop {
                let Some((len, v, flipped)) = decisions.pop() else {
                    return (CnfResult::Unsat, solver.stats);
                };
                solver.undo_to(len);
                if !flipped {
                    decisions.push((len, v, true));
                    solver.assign((2 * v + 1) as u32);
                    break;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute(f: &CnfFormula) -> bool {
        (0u32..1 << f.num_vars).any(|bits| {
            let a: Vec<bool> = (0..f.num_vars).map(|i| bits >> i & 1 == 1).collect();
            f.evaluate(&a)
        })
    }

    #[test]
    fn unit_propagation() {
        let f = CnfFormula { num_vars: 2, clauses: vec![vec![1, 2], vec![-1]] };
        assert_eq!(cnf_sat(&f, &[]), CnfResult::Sat(vec![false, true]));
        let g = CnfFormula { num_vars: 1, clauses: vec![vec![1], vec![-1]] };
        assert_eq!(cnf_sat(&g, &[]), CnfResult::Unsat);
        assert_eq!(cnf_sat(&CnfFormula { num_vars: 1, clauses: vec![vec![]] }, &[]), CnfResult::Unsat);
    }

    #[test]
    fn assumptions() {
        let f = CnfFormula { num_vars: 2, clauses: vec![vec![1, 2]] };
        assert_eq!(cnf_sat(&f, &[-1, -2]), CnfResult::Unsat);
        assert_eq!(cnf_sat(&f, &[-1]), CnfResult::Sat(vec![false, true]));
    }

    #[test]
    fn random_small_against_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for branching in [Branching::Lowest, Branching::ShortestClauses] {
            let options = CnfOptions { branching, ..CnfOptions::default() };
            for _ in 0..300 {
                let n = rng.random_range(1..=10usize);
                let m = rng.random_range(0..=5 * n);
                let mut f = CnfFormula::new(n);
                for _ in 0..m {
                    let k = rng.random_range(1..=3);
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
                let (r, _) = cnf_sat_with(&f, &[], &options);
                assert_eq!(r.is_sat(), brute(&f), "{f:?}");
                if let CnfResult::Sat(a) = r {
                    assert!(f.evaluate(&a));
                }
            }
        }
    }

    #[test]
    fn budget_yields_unknown() {
        // pigeonhole 5 into 4 needs many decisions
        let (p, h) = (5, 4);
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
        let options = CnfOptions { decision_budget: Some(3), ..CnfOptions::default() };
        assert_eq!(cnf_sat_with(&f, &[], &options).0, CnfResult::Unknown);
        assert_eq!(cnf_sat(&f, &[]), CnfResult::Unsat);
    }
}
