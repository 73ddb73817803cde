//! A small CDCL solver: two watched literals, first-UIP learning with
//! clause minimization, VSIDS on a binary heap, phase saving and Luby
//! restarts. Learned clauses are kept; a conflict limit bounds the run.

use std::time::Instant;

use crate::encoding::{CnfInstance, Model};

/// Literal `2 * var + sign` over 0-based variables; sign 1 is negative.
type Lit = u32;

fn lit_of(dimacs: i32) -> Lit {
    let v = dimacs.unsigned_abs() - 1;
    2 * v + u32::from(dimacs < 0)
}

fn var(l: Lit) -> usize {
    (l >> 1) as usize
}

fn neg(l: Lit) -> Lit {
    l ^ 1
}

const UNDEF: u8 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Outcome {
    Sat(Vec<bool>),
    Unsat,
    Limit(&'static str),
}

struct Heap {
    heap: Vec<usize>,
    pos: Vec<usize>,
}

const ABSENT: usize = usize::MAX;

impl Heap {
    fn new(n: usize) -> Self {
        Heap {
            heap: (0..n).collect(),
            pos: (0..n).collect(),
        }
    }

    fn contains(&self, v: usize) -> bool {
        self.pos[v] != ABSENT
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let p = (i - 1) / 2;
            if act[self.heap[p]] >= act[v] {
                break;
            }
            self.heap[i] = self.heap[p];
            self.pos[self.heap[i]] = i;
            i = p;
        }
        self.heap[i] = v;
        self.pos[v] = i;
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let l = 2 * i + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let c = if r < n && act[self.heap[r]] > act[self.heap[l]] {
                r
            } else {
                l
            };
            if act[self.heap[c]] <= act[v] {
                break;
            }
            self.heap[i] = self.heap[c];
            self.pos[self.heap[i]] = i;
            i = c;
        }
        self.heap[i] = v;
        self.pos[v] = i;
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v);
        let i = self.heap.len() - 1;
        self.pos[v] = i;
        self.up(i, act);
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().expect("non-empty");
        self.pos[top] = ABSENT;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last] = 0;
            self.down(0, act);
        }
        Some(top)
    }
}

fn luby(mut i: u64) -> u64 {
    // i-th element (0-based) of 1 1 2 1 1 2 4 ...
    let mut size = 1;
    let mut seq = 0;
    while size < i + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != i {
        size = (size - 1) / 2;
        seq -= 1;
        i %= size;
    }
    1 << seq
}

pub(crate) struct Solver {
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    value: Vec<u8>,
    level: Vec<u32>,
    reason: Vec<usize>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    heap: Heap,
    phase: Vec<bool>,
    seen: Vec<bool>,
    unsat: bool,
    pub(crate) conflicts: u64,
}

const NO_REASON: usize = usize::MAX;

impl Solver {
    pub(crate) fn new(instance: &CnfInstance) -> Self {
        let n = instance.variables();
        let mut s = Solver {
            clauses: Vec::with_capacity(instance.clause_count()),
            watches: vec![Vec::new(); 2 * n],
            value: vec![UNDEF; n],
            level: vec![0; n],
            reason: vec![NO_REASON; n],
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: vec![0.0; n],
            var_inc: 1.0,
            heap: Heap::new(n),
            phase: vec![false; n],
            seen: vec![false; n],
            unsat: false,
            conflicts: 0,
        };
        let mut buf: Vec<Lit> = Vec::new();
        for clause in instance.clauses() {
            if s.unsat {
                break;
            }
            buf.clear();
            buf.extend(clause.iter().map(|&l| lit_of(l)));
            buf.sort_unstable();
            buf.dedup();
            if buf.windows(2).any(|w| w[0] == neg(w[1])) {
                continue;
            }
            // drop literals false at level 0, skip clauses already true
            if buf.iter().any(|&l| s.lit_value(l) == 1) {
                continue;
            }
            buf.retain(|&l| s.lit_value(l) != 0);
            match buf.len() {
                0 => s.unsat = true,
                1 => {
                    s.enqueue(buf[0], NO_REASON);
                    if s.propagate().is_some() {
                        s.unsat = true;
                    }
                }
                _ => {
                    let idx = s.clauses.len();
                    s.watches[buf[0] as usize].push(idx);
                    s.watches[buf[1] as usize].push(idx);
                    s.clauses.push(buf.clone());
                }
            }
        }
        s
    }

    /// 1 true, 0 false, 2 unassigned.
    fn lit_value(&self, l: Lit) -> u8 {
        match self.value[var(l)] {
            UNDEF => UNDEF,
            v => v ^ (l & 1) as u8,
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: Lit, reason: usize) {
        let v = var(l);
        self.value[v] = 1 ^ (l & 1) as u8;
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Returns a conflicting clause index.
    fn propagate(&mut self) -> Option<usize> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = neg(p);
            let mut ws = std::mem::take(&mut self.watches[false_lit as usize]);
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            while i < ws.len() {
                let ci = ws[i];
                i += 1;
                let clause = &mut self.clauses[ci];
                if clause[0] == false_lit {
                    clause.swap(0, 1);
                }
                let first = clause[0];
                let first_val = match self.value[var(first)] {
                    UNDEF => UNDEF,
                    v => v ^ (first & 1) as u8,
                };
                if first_val == 1 {
                    ws[j] = ci;
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..clause.len() {
                    let l = clause[k];
                    let lv = match self.value[var(l)] {
                        UNDEF => UNDEF,
                        v => v ^ (l & 1) as u8,
                    };
                    if lv != 0 {
                        clause.swap(1, k);
                        self.watches[clause[1] as usize].push(ci);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = ci;
                j += 1;
                if first_val == 0 {
                    conflict = Some(ci);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, ci);
                }
            }
            ws.truncate(j);
            self.watches[false_lit as usize] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn bump(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        if self.heap.contains(v) {
            let i = self.heap.pos[v];
            self.heap.up(i, &self.activity);
        }
    }

    /// First-UIP clause (asserting literal first) and the backjump level.
    fn analyze(&mut self, mut confl: usize) -> (Vec<Lit>, u32) {
        let mut learnt: Vec<Lit> = vec![0];
        let mut pending = 0;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();
        loop {
            let start = usize::from(p.is_some());
            for k in start..self.clauses[confl].len() {
                let q = self.clauses[confl][k];
                let v = var(q);
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump(v);
                    if self.level[v] >= self.decision_level() {
                        pending += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[var(self.trail[idx])] {
                    break;
                }
            }
            let lit = self.trail[idx];
            p = Some(lit);
            self.seen[var(lit)] = false;
            pending -= 1;
            if pending == 0 {
                learnt[0] = neg(lit);
                break;
            }
            confl = self.reason[var(lit)];
        }
        // drop literals implied by the rest of the clause
        let marked: Vec<Lit> = learnt[1..].to_vec();
        let keep: Vec<Lit> = marked
            .iter()
            .copied()
            .filter(|&l| {
                let r = self.reason[var(l)];
                r == NO_REASON
                    || !self.clauses[r]
                        .iter()
                        .skip(1)
                        .all(|&q| self.seen[var(q)] || self.level[var(q)] == 0)
            })
            .collect();
        for &l in &marked {
            self.seen[var(l)] = false;
        }
        learnt.truncate(1);
        learnt.extend(keep);
        let mut back = 0;
        if learnt.len() > 1 {
            let (mut best, mut lvl) = (1, self.level[var(learnt[1])]);
            for (k, &l) in learnt.iter().enumerate().skip(2) {
                if self.level[var(l)] > lvl {
                    best = k;
                    lvl = self.level[var(l)];
                }
            }
            learnt.swap(1, best);
            back = lvl;
        }
        (learnt, back)
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for k in (lim..self.trail.len()).rev() {
            let l = self.trail[k];
            let v = var(l);
            self.phase[v] = l & 1 == 0;
            self.value[v] = UNDEF;
            self.reason[v] = NO_REASON;
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = lim;
    }

    fn pick(&mut self) -> Option<Lit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.value[v] == UNDEF {
                return Some(2 * v as u32 + u32::from(!self.phase[v]));
            }
        }
        None
    }

    pub(crate) fn solve(&mut self, conflict_limit: Option<u64>, deadline: Option<Instant>) -> Outcome {
        if self.unsat {
            return Outcome::Unsat;
        }
        if self.propagate().is_some() {
            return Outcome::Unsat;
        }
        let mut restart_idx = 0;
        let mut until_restart = 100 * luby(restart_idx);
        loop {
            if let Some(confl) = self.propagate() {
                self.conflicts += 1;
                if self.decision_level() == 0 {
                    return Outcome::Unsat;
                }
                let (learnt, back) = self.analyze(confl);
                self.cancel_until(back);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                } else {
                    let idx = self.clauses.len();
                    self.watches[learnt[0] as usize].push(idx);
                    self.watches[learnt[1] as usize].push(idx);
                    let first = learnt[0];
                    self.clauses.push(learnt);
                    self.enqueue(first, idx);
                }
                self.var_inc /= 0.95;
                until_restart = until_restart.saturating_sub(1);
                if let Some(limit) = conflict_limit {
                    if self.conflicts >= limit {
                        return Outcome::Limit("conflict limit reached");
                    }
                }
                if self.conflicts.is_multiple_of(256) && deadline.is_some_and(|d| Instant::now() >= d) {
                    return Outcome::Limit("deadline reached");
                }
            } else {
                if until_restart == 0 {
                    restart_idx += 1;
                    until_restart = 100 * luby(restart_idx);
                    self.cancel_until(0);
                    continue;
                }
                if conflict_limit == Some(0) && !self.heap.heap.is_empty() {
                    return Outcome::Limit("conflict limit reached");
                }
                match self.pick() {
                    None => {
                        let mut model = vec![false; self.value.len() + 1];
                        for (v, &val) in self.value.iter().enumerate() {
                            model[v + 1] = val == 1;
                        }
                        return Outcome::Sat(model);
                    }
                    Some(l) => {
                        self.trail_lim.push(self.trail.len());
                        self.enqueue(l, NO_REASON);
                    }
                }
            }
        }
    }
}

pub(crate) fn solve(instance: &CnfInstance, conflict_limit: Option<u64>, deadline: Option<Instant>) -> Outcome {
    Solver::new(instance).solve(conflict_limit, deadline)
}

pub(crate) fn model(values: Vec<bool>) -> Model {
    Model::from_values(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(clauses: &[&[i32]]) -> Outcome {
        solve(&CnfInstance::from_clauses(clauses.iter().copied()), None, None)
    }

    #[test]
    fn luby_sequence() {
        let s: Vec<u64> = (0..15).map(luby).collect();
        assert_eq!(s, [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }

    #[test]
    fn small_cases() {
        assert_eq!(run(&[&[1, 2], &[-1], &[-2]]), Outcome::Unsat);
        assert_eq!(run(&[&[1]]), Outcome::Sat(vec![false, true]));
        assert_eq!(run(&[&[1], &[-1]]), Outcome::Unsat);
        assert_eq!(run(&[]), Outcome::Sat(vec![false]));
        match run(&[&[1, 2, 3], &[-1, -2], &[-2, -3], &[-1, -3], &[2, 1]]) {
            Outcome::Sat(m) => assert_eq!(m.iter().filter(|&&b| b).count(), 1),
            other => panic!("{other:?}"),
        }
    }

    /// Pigeonhole principle: `p + 1` pigeons, `p` holes.
    fn pigeonhole(p: i32) -> CnfInstance {
        let var = |i: i32, j: i32| i * p + j + 1;
        let mut inst = CnfInstance::new(0);
        for i in 0..=p {
            inst.add_clause(&(0..p).map(|j| var(i, j)).collect::<Vec<_>>());
        }
        for j in 0..p {
            for a in 0..=p {
                for b in a + 1..=p {
                    inst.add_clause(&[-var(a, j), -var(b, j)]);
                }
            }
        }
        inst
    }

    #[test]
    fn pigeonhole_is_unsat() {
        for p in 1..=6 {
            assert_eq!(solve(&pigeonhole(p), None, None), Outcome::Unsat, "p = {p}");
        }
    }

    #[test]
    fn conflict_limit() {
        assert!(matches!(solve(&pigeonhole(6), Some(0), None), Outcome::Limit(_)));
        assert!(matches!(solve(&pigeonhole(8), Some(10), None), Outcome::Limit(_)));
    }
}
