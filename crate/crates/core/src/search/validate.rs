use std::collections::HashSet;

use serde::Serialize;

use crate::automata::TreeAutomaton;
use crate::terms::{innermost_successors, is_normal_form, CombinatorRule, Term};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    /// Levels of the reduction tree explored.
    pub steps: usize,
    /// Distinct terms checked.
    pub visited: usize,
    /// Leaf count of the largest term seen.
    pub max_leaves: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValidationFailure {
    #[error("term is not accepted: {term}")]
    NotAccepted { term: String },
    #[error("step {step}: reached a normal form: {term}")]
    NormalForm { step: usize, term: String },
    #[error("step {step}: reduct leaves the language: {term}")]
    Rejected { step: usize, term: String },
}

/// Explores innermost reductions from `term` level by level, keeping at most
/// `breadth` distinct terms per level, and checks that every term is
/// accepted and reducible.
pub fn validate_counterexample(
    term: &Term,
    automaton: &TreeAutomaton,
    rule: &CombinatorRule,
    steps: usize,
    breadth: usize,
) -> Result<ValidationReport, ValidationFailure> {
    let show = |t: &Term| rule.display_term(t).to_string();
    if !automaton.accepts(term) {
        return Err(ValidationFailure::NotAccepted { term: show(term) });
    }
    if is_normal_form(term, rule) {
        return Err(ValidationFailure::NormalForm {
            step: 0,
            term: show(term),
        });
    }
    let mut report = ValidationReport {
        steps: 0,
        visited: 1,
        max_leaves: term.leaf_count(),
    };
    let mut frontier = vec![term.clone()];
    for step in 1..=steps {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        'outer: for t in &frontier {
            for s in innermost_successors(t, rule) {
                if next.len() >= breadth.max(1) {
                    break 'outer;
                }
                if seen.insert(s.clone()) {
                    next.push(s);
                }
            }
        }
        if next.is_empty() {
            // only possible if every frontier term were normal
            break;
        }
        for s in &next {
            if !automaton.accepts(s) {
                return Err(ValidationFailure::Rejected { step, term: show(s) });
            }
            if innermost_successors(s, rule).is_empty() {
                return Err(ValidationFailure::NormalForm { step, term: show(s) });
            }
            report.max_leaves = report.max_leaves.max(s.leaf_count());
        }
        report.visited += next.len();
        report.steps = step;
        frontier = next;
    }
    Ok(report)
}
