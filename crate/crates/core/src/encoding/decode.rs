//! From models to automata and back.

use std::fmt;

use serde::Serialize;

use super::builder::{Builder, CheckReport};
use super::layout::Layout;
use super::{formulas, CnfInstance, EncodingError, Method, Model};
use crate::automata::{minld, nf_intersection_empty_at, Depth, State, StateSet, TreeAutomaton};
use crate::terms::{CombinatorRule, Term};

/// Reads the transition variables of a model. The model must be total and
/// satisfy every clause.
pub fn decode_automaton(instance: &CnfInstance, model: &Model) -> Result<TreeAutomaton, EncodingError> {
    let info = instance
        .info()
        .ok_or_else(|| EncodingError::InvalidInput("instance carries no variable map".into()))?;
    if model.variables() < instance.variables() {
        return Err(EncodingError::ModelInconsistent(format!(
            "assignment covers {} of {} variables",
            model.variables(),
            instance.variables()
        )));
    }
    if let Some(i) = instance.first_violated(model) {
        return Err(EncodingError::ModelInconsistent(format!(
            "clause {i} is falsified: {:?}",
            instance.clause(i)
        )));
    }
    let n = info.states;
    let l = &info.layout;
    let mut a = TreeAutomaton::new(n, StateSet::singleton(n)).expect("state count checked at encoding");
    for q in 1..=n {
        if model.lit(l.trans_leaf(q)) {
            a.add_leaf(q).expect("in range");
        }
        for q1 in 1..=n {
            for q2 in 1..=n {
                if model.lit(l.trans_app(q1, q2, q)) {
                    a.add_app(q1, q2, q).expect("in range");
                }
            }
        }
    }
    Ok(a)
}

/// Agreement between a model and recomputed automaton semantics.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub checked: usize,
    pub mismatches: Vec<String>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }

    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.mismatches.len() < 100 {
            self.mismatches.push(what());
        }
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} checks, {} mismatches", self.checked, self.mismatches.len())?;
        for m in &self.mismatches {
            write!(f, "\n  {m}")?;
        }
        Ok(())
    }
}

fn run_at(a: &TreeAutomaton, t: &Term, alpha: &[State]) -> StateSet {
    a.run_with(t, &|x| StateSet::singleton(alpha[x]))
}

/// Least fixpoint of the product with the left-depth automaton.
fn product_reach(a: &TreeAutomaton, m: usize) -> Vec<Vec<bool>> {
    let n = a.state_count();
    let mut r = vec![vec![false; m]; n + 1];
    for q in a.leaf_targets().iter() {
        r[q][0] = true;
    }
    let mut changed = true;
    while changed {
        changed = false;
        for (q1, q2, q) in a.app_rules() {
            for d1 in 0..m.saturating_sub(1) {
                if r[q1][d1] && !r[q][d1 + 1] && (0..m).any(|d2| r[q2][d2]) {
                    r[q][d1 + 1] = true;
                    changed = true;
                }
            }
        }
    }
    r
}

/// Compares every `MinLd`, `Redex`, `Eval` and product variable of the model
/// with the semantics recomputed from the decoded automaton.
pub fn audit_model(instance: &CnfInstance, model: &Model, a: &TreeAutomaton) -> AuditReport {
    let mut report = AuditReport::default();
    let Some(info) = instance.info() else {
        return report;
    };
    let (l, rule, n) = (&info.layout, &info.rule, info.states);
    let describe = |v: i32| l.describe(v as usize).describe(rule);
    match info.method {
        Method::Tdas => {
            let depths = minld(a);
            for (q, &dq) in depths.iter().enumerate().take(n).skip(1) {
                for m in 1..l.m {
                    let v = l.minld(q, m);
                    report.expect(model.lit(v) == (dq == Depth::Finite(m)), || {
                        format!("{} is {} but minld({q}) = {dq}", describe(v), model.lit(v))
                    });
                }
            }
            for q in 1..=n {
                let v = l.redex(q);
                if model.lit(v) {
                    let check = nf_intersection_empty_at(a, StateSet::singleton(q), rule);
                    report.expect(check.empty, || {
                        format!("{} holds but L(A,{q}) has a normal form", describe(v))
                    });
                }
            }
        }
        Method::TdaBaseline => {
            let reach = product_reach(a, l.m);
            for (q, row) in reach.iter().enumerate().skip(1) {
                for (d, &exact) in row.iter().enumerate() {
                    let v = l.product(q, d);
                    report.expect(!exact || model.lit(v), || {
                        format!("{} is false but reachable", describe(v))
                    });
                }
            }
        }
    }
    let mut alpha = vec![1; l.m];
    for t in 0..l.evals.len() {
        let term = &l.evals[t].term;
        for code in 0..l.alpha_count(t) {
            l.decode_alpha(t, code, &mut alpha);
            let run = run_at(a, term, &alpha);
            for q in 1..=n {
                let v = l.eval(t, &alpha, q);
                report.expect(model.lit(v) == run.contains(q), || {
                    format!("{} is {} but the run gives {:?}", describe(v), model.lit(v), run)
                });
            }
        }
    }
    report
}

/// Renumbers a TDAS so that its final sink is the last state and every
/// other state is produced from `Z` or from earlier states, as the encoding
/// requires. `None` if the final state is not a unique sink or some state
/// is unreachable.
pub fn encoding_order(a: &TreeAutomaton) -> Option<TreeAutomaton> {
    let finals = a.finals();
    let qf = finals.iter().next()?;
    if finals.len() != 1 || !a.is_sink(qf) {
        return None;
    }
    let n = a.state_count();
    let mut placed = StateSet::EMPTY;
    let mut perm = vec![0; n];
    perm[qf - 1] = n;
    for pos in 1..n {
        let next = a.states().find(|&q| {
            q != qf
                && !placed.contains(q)
                && (a.leaf_targets().contains(q) || a.app_targets_sets(placed, placed).contains(q))
        })?;
        placed.insert(next);
        perm[next - 1] = pos;
    }
    Some(a.permute(&perm))
}

/// Values of the structural variables that the automaton induces:
/// transitions from `Δ`, `MinLd` from the fixpoint, `Redex` as the greatest
/// set closed under the redex conditions, `Eval` from runs and the product
/// variables from exact reachability. Index 0 is unused.
pub fn witness_assignment(
    rule: &CombinatorRule,
    a: &TreeAutomaton,
    method: Method,
) -> Result<Vec<bool>, EncodingError> {
    let n = a.state_count();
    if n < rule.arity() + 1 {
        return Err(EncodingError::InvalidInput(format!("{n} states is below the minimum")));
    }
    let l = Layout::new(rule, n, method);
    let mut values = vec![false; l.structural() + 1];
    let mut set = |v: i32, b: bool| values[v as usize] = b;
    for q in 1..=n {
        set(l.trans_leaf(q), a.leaf_targets().contains(q));
        for q1 in 1..=n {
            for q2 in 1..=n {
                set(l.trans_app(q1, q2, q), a.has_app(q1, q2, q));
            }
        }
    }
    match method {
        Method::Tdas => {
            let depths = minld(a);
            for (q, &dq) in depths.iter().enumerate().take(n).skip(1) {
                for m in 1..l.m {
                    set(l.minld(q, m), dq == Depth::Finite(m));
                }
            }
            let last = Depth::Finite(l.m - 1);
            let mut redex: StateSet = a.states().filter(|&q| !a.leaf_targets().contains(q)).collect();
            loop {
                let broken = redex.iter().find(|&q| {
                    (1..n).any(|q1| {
                        (1..n).any(|q2| {
                            a.has_app(q1, q2, q) && !redex.contains(q1) && !redex.contains(q2) && depths[q1] != last
                        })
                    })
                });
                match broken {
                    Some(q) => redex.remove(q),
                    None => break,
                }
            }
            for q in 1..=n {
                set(l.redex(q), redex.contains(q));
            }
        }
        Method::TdaBaseline => {
            let reach = product_reach(a, l.m);
            for (q, row) in reach.iter().enumerate().skip(1) {
                for (d, &r) in row.iter().enumerate() {
                    set(l.product(q, d), r);
                }
            }
        }
    }
    let mut alpha = vec![1; l.m];
    for t in 0..l.evals.len() {
        if l.evals[t].base.is_none() {
            continue;
        }
        let term = &l.evals[t].term;
        for code in 0..l.alpha_count(t) {
            l.decode_alpha(t, code, &mut alpha);
            let run = run_at(a, term, &alpha);
            for q in 1..=n {
                set(l.eval(t, &alpha, q), run.contains(q));
            }
        }
    }
    Ok(values)
}

/// Streams the clauses of the `n`-state encoding against the assignment
/// induced by `a` without storing them. Zero violations means the instance
/// is satisfiable with `a` as the decoded automaton.
pub fn check_witness(rule: &CombinatorRule, a: &TreeAutomaton, method: Method) -> Result<CheckReport, EncodingError> {
    let values = witness_assignment(rule, a, method)?;
    let l = Layout::new(rule, a.state_count(), method);
    let mut b = Builder::check(values);
    formulas::emit(rule, &l, &mut b);
    Ok(b.finish_check())
}

impl CnfInstance {
    /// The model induced by `a` on this instance, with auxiliaries set to
    /// the value of their definitions.
    pub fn model_of(&self, a: &TreeAutomaton) -> Result<Model, EncodingError> {
        let info = self
            .info()
            .ok_or_else(|| EncodingError::InvalidInput("instance carries no variable map".into()))?;
        if a.state_count() != info.states {
            return Err(EncodingError::InvalidInput(
                "state count differs from the instance".into(),
            ));
        }
        let values = witness_assignment(&info.rule, a, info.method)?;
        // auxiliaries are defined in creation order, so replaying the
        // encoder in check mode yields their values
        let mut b = Builder::check(values);
        formulas::emit(&info.rule, &info.layout, &mut b);
        Ok(Model::from_values(b.into_values()))
    }
}
