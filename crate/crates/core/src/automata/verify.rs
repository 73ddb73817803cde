//! Independent verifiers for TDAS and TDA candidates.
//!
//! These never look at an encoding: they recompute every condition from the
//! transition table so that encoder bugs cannot hide behind a decoded model.

use std::fmt;

use serde::Serialize;

use super::analysis::{nf_intersection_empty, reachable_states};
use super::{AutomatonError, State, StateSet, TreeAutomaton};
use crate::terms::{CombinatorRule, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// Exactly one final state.
    SingleFinal,
    /// The final state is a sink.
    FinalSink,
    /// Some final state is reachable.
    FinalReachable,
    /// Every state is reachable.
    AllReachable,
    /// `L(A) ∩ NF = ∅`.
    NfEmpty,
    /// Closure under reduction, checked on all state substitutions. This is
    /// a sufficient condition for closure under innermost steps.
    Closure,
}

impl Condition {
    pub fn label(self) -> &'static str {
        match self {
            Condition::SingleFinal => "single final state",
            Condition::FinalSink => "final state is a sink",
            Condition::FinalReachable => "final state reachable",
            Condition::AllReachable => "all states reachable",
            Condition::NfEmpty => "no normal form accepted",
            Condition::Closure => "closure under innermost steps",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    State { state: State },
    Substitution { state: State, alpha: Vec<State> },
    Term { term: String },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::State { state } => write!(f, "state {state}"),
            Witness::Substitution { state, alpha } => {
                let a: Vec<String> = alpha.iter().map(|q| q.to_string()).collect();
                write!(
                    f,
                    "l{{x -> [{}]}} reaches {state} but the right-hand side does not",
                    a.join(", ")
                )
            }
            Witness::Term { term } => write!(f, "term {term}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionResult {
    pub condition: Condition,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ConditionResult {
    fn pass(condition: Condition) -> Self {
        ConditionResult {
            condition,
            passed: true,
            witness: None,
            note: None,
        }
    }

    fn fail(condition: Condition, witness: Option<Witness>) -> Self {
        ConditionResult {
            condition,
            passed: false,
            witness,
            note: None,
        }
    }

    fn check(condition: Condition, ok: bool, witness: impl FnOnce() -> Option<Witness>) -> Self {
        if ok {
            Self::pass(condition)
        } else {
            Self::fail(condition, witness())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AutomatonKind {
    Tdas,
    Tda,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub kind: AutomatonKind,
    pub results: Vec<ConditionResult>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConditionResult> {
        self.results.iter().filter(|r| !r.passed)
    }

    pub fn get(&self, condition: Condition) -> Option<&ConditionResult> {
        self.results.iter().find(|r| r.condition == condition)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            AutomatonKind::Tdas => "TDAS",
            AutomatonKind::Tda => "TDA",
        };
        for r in &self.results {
            write!(f, "{:<4} {}", if r.passed { "ok" } else { "FAIL" }, r.condition.label())?;
            if let Some(w) = &r.witness {
                write!(f, ": {w}")?;
            }
            if let Some(n) = &r.note {
                write!(f, " ({n})")?;
            }
            writeln!(f)?;
        }
        write!(f, "{kind} {}", if self.passed() { "verified" } else { "rejected" })
    }
}

/// Enumerates `α: {x1..xM} -> range` in lexicographic order and returns the
/// first `(q, α)` with `lα ⇒* q` for which `accept(q, run(rα))` fails.
/// Prefixes `Z α1 .. αk` with an empty run are pruned.
fn find_closure_violation(
    a: &TreeAutomaton,
    rule: &CombinatorRule,
    range: StateSet,
    accept: &dyn Fn(State, StateSet) -> bool,
) -> Option<(State, Vec<State>)> {
    fn go(
        a: &TreeAutomaton,
        rule: &CombinatorRule,
        range: StateSet,
        accept: &dyn Fn(State, StateSet) -> bool,
        prefix: StateSet,
        alpha: &mut Vec<State>,
    ) -> Option<(State, Vec<State>)> {
        if alpha.len() == rule.arity() {
            let rhs = a.run_with(rule.rhs(), &|i| StateSet::singleton(alpha[i]));
            return prefix.iter().find(|&q| !accept(q, rhs)).map(|q| (q, alpha.clone()));
        }
        for s in range.iter() {
            let next = a.app_targets_sets(prefix, StateSet::singleton(s));
            if next.is_empty() {
                continue;
            }
            alpha.push(s);
            let found = go(a, rule, range, accept, next, alpha);
            alpha.pop();
            if found.is_some() {
                return found;
            }
        }
        None
    }
    go(
        a,
        rule,
        range,
        accept,
        a.leaf_targets(),
        &mut Vec::with_capacity(rule.arity()),
    )
}

fn unique_sink_final(a: &TreeAutomaton) -> Option<State> {
    let f = a.finals();
    if f.len() != 1 {
        return None;
    }
    let q = f.iter().next()?;
    a.is_sink(q).then_some(q)
}

/// For all `q` and `α: FVar(l) -> Q \ {q_F}`: `lα ⇒* q` implies `rα ⇒* q`
/// or `rα ⇒* q_F`. Returns the first violating `(q, α)`, if any.
///
/// Substitutions hitting `q_F` are vacuous for innermost closure: the
/// arguments of an innermost redex are normal forms, and a TDAS accepts no
/// normal form at `q_F` (checked separately as [`Condition::NfEmpty`]).
/// They cannot simply be checked either, since `rα` may contain a subterm
/// without any run, in which case the sink never absorbs it.
pub fn closure_check(a: &TreeAutomaton, rule: &CombinatorRule) -> Result<Option<(State, Vec<State>)>, AutomatonError> {
    let qf = unique_sink_final(a).ok_or_else(|| {
        AutomatonError::InvalidInput("closure check needs a unique final state that is a sink".into())
    })?;
    let mut range = a.all_states();
    range.remove(qf);
    Ok(find_closure_violation(a, rule, range, &|q, rhs| {
        rhs.contains(q) || rhs.contains(qf)
    }))
}

/// Like [`closure_check`] but with `α` ranging over all of `Q`, final state
/// included. Stronger than needed; most TDASs fail it.
pub fn closure_check_all_substitutions(
    a: &TreeAutomaton,
    rule: &CombinatorRule,
) -> Result<Option<(State, Vec<State>)>, AutomatonError> {
    let qf = unique_sink_final(a).ok_or_else(|| {
        AutomatonError::InvalidInput("closure check needs a unique final state that is a sink".into())
    })?;
    Ok(find_closure_violation(a, rule, a.all_states(), &|q, rhs| {
        rhs.contains(q) || rhs.contains(qf)
    }))
}

/// TDA closure. With `strict`, `lα ⇒* q` must imply `rα ⇒* q`; otherwise
/// reaching any final state also counts.
pub fn closure_check_tda(a: &TreeAutomaton, rule: &CombinatorRule, strict: bool) -> Option<(State, Vec<State>)> {
    let finals = a.finals();
    find_closure_violation(a, rule, a.all_states(), &|q, rhs| {
        rhs.contains(q) || (!strict && !rhs.intersection(finals).is_empty())
    })
}

fn print(rule: &CombinatorRule, t: &Term) -> String {
    rule.display_term(t).to_string()
}

fn nf_result(a: &TreeAutomaton, rule: &CombinatorRule) -> ConditionResult {
    let check = nf_intersection_empty(a, rule);
    ConditionResult::check(Condition::NfEmpty, check.empty, || {
        check.witness.as_ref().map(|t| Witness::Term { term: print(rule, t) })
    })
}

fn closure_result(violation: Option<(State, Vec<State>)>) -> ConditionResult {
    let mut r = match violation {
        None => ConditionResult::pass(Condition::Closure),
        Some((state, alpha)) => ConditionResult::fail(Condition::Closure, Some(Witness::Substitution { state, alpha })),
    };
    r.note = Some("substitution check".into());
    r
}

/// Checks that `A` is a TDAS: a unique final state that is a reachable
/// sink, all states reachable, no accepted normal form, and closure.
pub fn verify_tdas(a: &TreeAutomaton, rule: &CombinatorRule) -> VerificationReport {
    let finals = a.finals();
    let reach = reachable_states(a);
    let single = finals.len() == 1;
    let qf = finals.iter().next();
    let mut results = vec![ConditionResult::check(Condition::SingleFinal, single, || None)];
    results.push(match qf {
        Some(q) if single => {
            ConditionResult::check(Condition::FinalSink, a.is_sink(q), || Some(Witness::State { state: q }))
        }
        _ => {
            let mut r = ConditionResult::fail(Condition::FinalSink, None);
            r.note = Some("not evaluated without a unique final state".into());
            r
        }
    });
    results.push(ConditionResult::check(
        Condition::FinalReachable,
        !finals.intersection(reach).is_empty(),
        || qf.map(|state| Witness::State { state }),
    ));
    let unreachable = a.states().find(|&q| !reach.contains(q));
    results.push(ConditionResult::check(
        Condition::AllReachable,
        unreachable.is_none(),
        || unreachable.map(|state| Witness::State { state }),
    ));
    results.push(nf_result(a, rule));
    results.push(match closure_check(a, rule) {
        Ok(v) => closure_result(v),
        Err(_) => {
            let mut r = ConditionResult::fail(Condition::Closure, None);
            r.note = Some("not evaluated without a unique sink final state".into());
            r
        }
    });
    VerificationReport {
        kind: AutomatonKind::Tdas,
        results,
    }
}

/// Checks that `A` is a TDA: a reachable final state, no accepted normal
/// form, and closure where the right-hand side may escape to any final
/// state.
pub fn verify_tda(a: &TreeAutomaton, rule: &CombinatorRule) -> VerificationReport {
    verify_tda_with(a, rule, false)
}

pub(crate) fn verify_tda_with(a: &TreeAutomaton, rule: &CombinatorRule, strict: bool) -> VerificationReport {
    let reach = reachable_states(a);
    let results = vec![
        ConditionResult::check(
            Condition::FinalReachable,
            !a.finals().intersection(reach).is_empty(),
            || None,
        ),
        nf_result(a, rule),
        closure_result(closure_check_tda(a, rule, strict)),
    ];
    VerificationReport {
        kind: AutomatonKind::Tda,
        results,
    }
}
