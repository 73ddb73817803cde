//! Clause sink with Tseitin helpers.
//!
//! In `Collect` mode clauses are appended to a flat store. In `Check` mode
//! nothing is stored: every clause is evaluated against a given assignment
//! (auxiliaries get the value of their definition as they are created), so
//! a candidate model can be checked against an instance too large to hold.

use std::collections::HashMap;

pub(crate) enum Sink {
    Collect { lits: Vec<i32>, starts: Vec<usize> },
    Check(CheckState),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub variables: usize,
    pub clauses: usize,
    pub violated: usize,
    pub first_violation: Option<Vec<i32>>,
}

pub(crate) struct CheckState {
    values: Vec<bool>,
    report: CheckReport,
}

pub(crate) struct Builder {
    next_var: usize,
    sink: Sink,
    cache: HashMap<Vec<i32>, i32>,
}

impl Builder {
    /// `reserved` structural variables `1..=reserved` are allocated up front.
    pub(crate) fn collect(reserved: usize) -> Self {
        Builder {
            next_var: reserved,
            sink: Sink::Collect {
                lits: Vec::new(),
                starts: vec![0],
            },
            cache: HashMap::new(),
        }
    }

    /// `values[v]` for `v in 1..=reserved` (index 0 unused).
    pub(crate) fn check(values: Vec<bool>) -> Self {
        Builder {
            next_var: values.len() - 1,
            sink: Sink::Check(CheckState {
                values,
                report: CheckReport::default(),
            }),
            cache: HashMap::new(),
        }
    }

    pub(crate) fn finish_collect(self) -> (usize, Vec<i32>, Vec<usize>) {
        match self.sink {
            Sink::Collect { lits, starts } => (self.next_var, lits, starts),
            Sink::Check(_) => panic!("builder is in check mode"),
        }
    }

    pub(crate) fn finish_check(self) -> CheckReport {
        match self.sink {
            Sink::Check(mut s) => {
                s.report.variables = self.next_var;
                s.report
            }
            Sink::Collect { .. } => panic!("builder is in collect mode"),
        }
    }

    pub(crate) fn into_values(self) -> Vec<bool> {
        match self.sink {
            Sink::Check(s) => s.values,
            Sink::Collect { .. } => panic!("builder is in collect mode"),
        }
    }

    fn value(values: &[bool], lit: i32) -> bool {
        values[lit.unsigned_abs() as usize] == (lit > 0)
    }

    pub(crate) fn clause(&mut self, clause: &[i32]) {
        match &mut self.sink {
            Sink::Collect { lits, starts } => {
                lits.extend_from_slice(clause);
                starts.push(lits.len());
            }
            Sink::Check(s) => {
                s.report.clauses += 1;
                if !clause.iter().any(|&l| Self::value(&s.values, l)) {
                    s.report.violated += 1;
                    if s.report.first_violation.is_none() {
                        s.report.first_violation = Some(clause.to_vec());
                    }
                }
            }
        }
    }

    pub(crate) fn unit(&mut self, lit: i32) {
        self.clause(&[lit]);
    }

    fn fresh(&mut self, value: impl FnOnce(&[bool]) -> bool) -> i32 {
        self.next_var += 1;
        if let Sink::Check(s) = &mut self.sink {
            let v = value(&s.values);
            s.values.push(v);
        }
        self.next_var as i32
    }

    /// `x ⇔ l1 ∧ .. ∧ lk`.
    pub(crate) fn define_and(&mut self, x: i32, lits: &[i32]) {
        let mut long = Vec::with_capacity(lits.len() + 1);
        long.push(x);
        for &l in lits {
            self.clause(&[-x, l]);
            long.push(-l);
        }
        self.clause(&long);
    }

    /// `x ⇔ l1 ∨ .. ∨ lk`.
    pub(crate) fn define_or(&mut self, x: i32, lits: &[i32]) {
        let mut long = Vec::with_capacity(lits.len() + 1);
        long.push(-x);
        for &l in lits {
            self.clause(&[x, -l]);
            long.push(l);
        }
        self.clause(&long);
    }

    /// A fresh auxiliary for the conjunction (not shared).
    pub(crate) fn and(&mut self, lits: &[i32]) -> i32 {
        let x = self.fresh(|v| lits.iter().all(|&l| Self::value(v, l)));
        self.define_and(x, lits);
        x
    }

    /// An auxiliary for the conjunction, shared with any earlier identical one.
    pub(crate) fn and_shared(&mut self, lits: &[i32]) -> i32 {
        let mut key = lits.to_vec();
        key.sort_unstable();
        key.dedup();
        key.insert(0, 0); // tag: conjunction
        if let Some(&x) = self.cache.get(&key) {
            return x;
        }
        let x = self.and(lits);
        self.cache.insert(key, x);
        x
    }

    /// A literal equivalent to the disjunction; the literal itself when
    /// there is only one.
    pub(crate) fn or_shared(&mut self, lits: &[i32]) -> i32 {
        if lits.len() == 1 {
            return lits[0];
        }
        let mut key = lits.to_vec();
        key.sort_unstable();
        key.dedup();
        key.insert(0, 1); // tag: disjunction
        if let Some(&x) = self.cache.get(&key) {
            return x;
        }
        let x = self.fresh(|v| lits.iter().any(|&l| Self::value(v, l)));
        self.define_or(x, lits);
        self.cache.insert(key, x);
        x
    }
}
