use std::fmt;

use serde::Serialize;

use super::smallest::{smallest_trees, TreeGrammar};
use super::{State, StateSet, TreeAutomaton};
use crate::terms::{CombinatorRule, Term};

/// Least fixpoint of `Z -> q` and `A(q1,q2) -> q` with `q1, q2` reachable.
pub fn reachable_states(a: &TreeAutomaton) -> StateSet {
    let mut reach = a.leaf_targets();
    loop {
        let next = reach.union(a.app_targets_sets(reach, reach));
        if next == reach {
            return reach;
        }
        reach = next;
    }
}

/// A left depth or infinity (for states with an empty language).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Depth {
    Finite(usize),
    Infinite,
}

impl Depth {
    pub fn finite(self) -> Option<usize> {
        match self {
            Depth::Finite(d) => Some(d),
            Depth::Infinite => None,
        }
    }
}

impl fmt::Display for Depth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Depth::Finite(d) => write!(f, "{d}"),
            Depth::Infinite => f.write_str("inf"),
        }
    }
}

/// `minld(q) = min { ldepth(t) | t ∈ L(A,q) }`, indexed by state (index 0
/// unused).
pub fn minld(a: &TreeAutomaton) -> Vec<Depth> {
    let n = a.state_count();
    let reach = reachable_states(a);
    let mut best = vec![Depth::Infinite; n + 1];
    for q in a.leaf_targets().iter() {
        best[q] = Depth::Finite(0);
    }
    let mut changed = true;
    while changed {
        changed = false;
        for (q1, q2, q) in a.app_rules() {
            if !reach.contains(q2) {
                continue;
            }
            if let Depth::Finite(d) = best[q1] {
                if Depth::Finite(d + 1) < best[q] {
                    best[q] = Depth::Finite(d + 1);
                    changed = true;
                }
            }
        }
    }
    best
}

/// Outcome of the `L(A) ∩ NF = ∅` check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NfCheck {
    pub empty: bool,
    /// A smallest accepted normal form when the intersection is non-empty.
    pub witness: Option<Term>,
}

/// Decides `L(A, F') ∩ NF = ∅` for the given target states `F'` via the
/// product with the left-depth automaton (`Z -> 0`, `A(d1,d2) -> d1+1` while
/// `d1 + 1 < M`), which recognizes exactly the normal forms.
pub fn nf_intersection_empty_at(a: &TreeAutomaton, targets: StateSet, rule: &CombinatorRule) -> NfCheck {
    let m = rule.arity();
    let n = a.state_count();
    let index = |q: State, d: usize| (q - 1) * m + d;
    let mut grammar = TreeGrammar::new(n * m);
    for q in a.leaf_targets().iter() {
        grammar.leaves.push(index(q, 0));
    }
    for (q1, q2, q) in a.app_rules() {
        for d1 in 0..m.saturating_sub(1) {
            for d2 in 0..m {
                grammar.rules.push((index(q1, d1), index(q2, d2), index(q, d1 + 1)));
            }
        }
    }
    let best = smallest_trees(&grammar);
    let witness = targets
        .iter()
        .flat_map(|q| (0..m).map(move |d| index(q, d)))
        .filter_map(|i| best[i].as_ref())
        .min_by(|x, y| x.key().cmp(&y.key()))
        .map(|found| found.term.clone());
    NfCheck {
        empty: witness.is_none(),
        witness,
    }
}

/// `L(A) ∩ NF(R) = ∅` over the final states.
pub fn nf_intersection_empty(a: &TreeAutomaton, rule: &CombinatorRule) -> NfCheck {
    nf_intersection_empty_at(a, a.finals(), rule)
}
