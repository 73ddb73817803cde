//! Bottom-up nondeterministic tree automata over `{Z/0, A/2}`.
//!
//! States are numbered `1..=N` (at most [`MAX_STATES`]) and state sets are
//! bitsets, which keeps runs and fixpoints cheap at the sizes the search
//! produces.

mod analysis;
mod construct;
mod format;
mod inclusion;
mod sample;
mod smallest;
mod verify;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::terms::Term;

pub use analysis::{minld, nf_intersection_empty, nf_intersection_empty_at, reachable_states, Depth, NfCheck};
pub use construct::{tda_to_tdas, CONSTRUCTION_STATE_LIMIT};
pub use format::{parse_automaton, serialize_automaton};
pub use inclusion::{language_inclusion, SUBSET_STATE_LIMIT};
pub use sample::random_accepted_term;
pub use smallest::{smallest_accepted_term, smallest_term_at};
pub use verify::{
    closure_check, closure_check_all_substitutions, closure_check_tda, verify_tda, verify_tdas, AutomatonKind,
    Condition, ConditionResult, VerificationReport, Witness,
};

pub type State = usize;

pub const MAX_STATES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AutomatonError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("state {state} out of range 1..={states}")]
    StateOutOfRange { state: usize, states: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
}

/// A set of states as a bitset; bit `q - 1` represents state `q`.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateSet(pub u64);

impl StateSet {
    pub const EMPTY: StateSet = StateSet(0);

    pub fn singleton(q: State) -> Self {
        StateSet(1 << (q - 1))
    }

    /// `{1, .., n}`.
    pub fn full(n: usize) -> Self {
        if n == 64 {
            StateSet(u64::MAX)
        } else {
            StateSet((1u64 << n) - 1)
        }
    }

    pub fn contains(self, q: State) -> bool {
        (1..=64).contains(&q) && self.0 >> (q - 1) & 1 == 1
    }

    pub fn insert(&mut self, q: State) {
        self.0 |= 1 << (q - 1);
    }

    pub fn remove(&mut self, q: State) {
        self.0 &= !(1 << (q - 1));
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn union(self, other: StateSet) -> StateSet {
        StateSet(self.0 | other.0)
    }

    pub fn intersection(self, other: StateSet) -> StateSet {
        StateSet(self.0 & other.0)
    }

    pub fn iter(self) -> impl Iterator<Item = State> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let q = bits.trailing_zeros() as usize + 1;
                bits &= bits - 1;
                Some(q)
            }
        })
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<State> for StateSet {
    fn from_iter<I: IntoIterator<Item = State>>(iter: I) -> Self {
        let mut s = StateSet::EMPTY;
        for q in iter {
            s.insert(q);
        }
        s
    }
}

/// `A = (Q, {Z, A}, F, Δ)` with `Q = {1..N}`.
///
/// Transitions are stored as a dense table: `leaf` holds the targets of
/// `Z -> q`, `app[(q1-1)*N + (q2-1)]` the targets of `A(q1,q2) -> q`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TreeAutomaton {
    states: usize,
    finals: StateSet,
    leaf: StateSet,
    app: Vec<StateSet>,
}

impl TreeAutomaton {
    /// An automaton with no transitions.
    pub fn new(states: usize, finals: StateSet) -> Result<Self, AutomatonError> {
        if states == 0 || states > MAX_STATES {
            return Err(AutomatonError::InvalidInput(format!(
                "state count must be in 1..={MAX_STATES}, got {states}"
            )));
        }
        if finals.is_empty() {
            return Err(AutomatonError::InvalidInput("final state set is empty".into()));
        }
        if let Some(q) = finals.iter().find(|&q| q > states) {
            return Err(AutomatonError::StateOutOfRange { state: q, states });
        }
        Ok(TreeAutomaton {
            states,
            finals,
            leaf: StateSet::EMPTY,
            app: vec![StateSet::EMPTY; states * states],
        })
    }

    pub fn state_count(&self) -> usize {
        self.states
    }

    pub fn states(&self) -> impl Iterator<Item = State> {
        1..=self.states
    }

    pub fn all_states(&self) -> StateSet {
        StateSet::full(self.states)
    }

    pub fn finals(&self) -> StateSet {
        self.finals
    }

    pub fn set_finals(&mut self, finals: StateSet) -> Result<(), AutomatonError> {
        if finals.is_empty() {
            return Err(AutomatonError::InvalidInput("final state set is empty".into()));
        }
        self.check(finals.iter().max().unwrap_or(1))?;
        self.finals = finals;
        Ok(())
    }

    fn check(&self, q: State) -> Result<(), AutomatonError> {
        if q == 0 || q > self.states {
            Err(AutomatonError::StateOutOfRange {
                state: q,
                states: self.states,
            })
        } else {
            Ok(())
        }
    }

    pub fn add_leaf(&mut self, q: State) -> Result<(), AutomatonError> {
        self.check(q)?;
        self.leaf.insert(q);
        Ok(())
    }

    pub fn add_app(&mut self, q1: State, q2: State, q: State) -> Result<(), AutomatonError> {
        self.check(q1)?;
        self.check(q2)?;
        self.check(q)?;
        let idx = self.index(q1, q2);
        self.app[idx].insert(q);
        Ok(())
    }

    pub fn remove_app(&mut self, q1: State, q2: State, q: State) {
        let idx = self.index(q1, q2);
        self.app[idx].remove(q);
    }

    pub fn remove_leaf(&mut self, q: State) {
        self.leaf.remove(q);
    }

    /// Adds `A(q1,q2) -> q` for every pair mentioning `q`.
    pub fn add_sink_rules(&mut self, q: State) -> Result<(), AutomatonError> {
        self.check(q)?;
        for other in 1..=self.states {
            self.add_app(q, other, q)?;
            self.add_app(other, q, q)?;
        }
        Ok(())
    }

    #[inline]
    fn index(&self, q1: State, q2: State) -> usize {
        (q1 - 1) * self.states + (q2 - 1)
    }

    /// Targets of `Z -> q`.
    pub fn leaf_targets(&self) -> StateSet {
        self.leaf
    }

    /// Targets of `A(q1,q2) -> q`.
    #[inline]
    pub fn app_targets(&self, q1: State, q2: State) -> StateSet {
        self.app[self.index(q1, q2)]
    }

    /// `⋃ { app_targets(q1,q2) | q1 ∈ left, q2 ∈ right }`.
    pub fn app_targets_sets(&self, left: StateSet, right: StateSet) -> StateSet {
        let mut out = StateSet::EMPTY;
        for q1 in left.iter() {
            let row = (q1 - 1) * self.states;
            for q2 in right.iter() {
                out = out.union(self.app[row + q2 - 1]);
            }
        }
        out
    }

    pub fn has_app(&self, q1: State, q2: State, q: State) -> bool {
        self.app_targets(q1, q2).contains(q)
    }

    /// All application rules as `(q1, q2, q)` in lexicographic order.
    pub fn app_rules(&self) -> impl Iterator<Item = (State, State, State)> + '_ {
        (1..=self.states).flat_map(move |q1| {
            (1..=self.states).flat_map(move |q2| self.app_targets(q1, q2).iter().map(move |q| (q1, q2, q)))
        })
    }

    pub fn rule_count(&self) -> usize {
        self.leaf.len() + self.app.iter().map(|s| s.len()).sum::<usize>()
    }

    /// `{q | t ⇒* q}` for a ground term.
    pub fn run(&self, t: &Term) -> StateSet {
        self.run_with(t, &|_| StateSet::EMPTY)
    }

    /// Runs a term whose variables evaluate to the given state sets. A state
    /// constant `q` is passed as the singleton `{q}`.
    pub fn run_with(&self, t: &Term, var: &dyn Fn(usize) -> StateSet) -> StateSet {
        match t {
            Term::Comb => self.leaf,
            Term::Var(i) => var(*i),
            Term::App(l, r) => {
                let left = self.run_with(l, var);
                if left.is_empty() {
                    return StateSet::EMPTY;
                }
                let right = self.run_with(r, var);
                self.app_targets_sets(left, right)
            }
        }
    }

    pub fn accepts(&self, t: &Term) -> bool {
        !self.run(t).intersection(self.finals).is_empty()
    }

    pub fn is_sink(&self, q: State) -> bool {
        if q == 0 || q > self.states {
            return false;
        }
        let only = StateSet::singleton(q);
        (1..=self.states).all(|other| self.app_targets(q, other) == only && self.app_targets(other, q) == only)
    }

    /// The leaf rules as a list, for iteration.
    pub fn leaf_rules(&self) -> BTreeSet<State> {
        self.leaf.iter().collect()
    }

    /// Keeps the states in `keep` (renumbered in increasing order) and drops
    /// every rule touching another state. Returns the automaton and the map
    /// from old to new state numbers (`0` for dropped states).
    pub fn restrict(&self, keep: StateSet, finals: StateSet) -> Result<(Self, Vec<State>), AutomatonError> {
        let mut map = vec![0; self.states + 1];
        for (i, q) in keep.iter().enumerate() {
            map[q] = i + 1;
        }
        let renumber = |s: StateSet| -> StateSet { s.intersection(keep).iter().map(|q| map[q]).collect() };
        let mut out = TreeAutomaton::new(keep.len(), renumber(finals))?;
        out.leaf = renumber(self.leaf);
        for (q1, q2, q) in self.app_rules() {
            if keep.contains(q1) && keep.contains(q2) && keep.contains(q) {
                out.add_app(map[q1], map[q2], map[q])?;
            }
        }
        Ok((out, map))
    }

    /// Applies a state permutation: old state `q` becomes `perm[q - 1]`.
    pub fn permute(&self, perm: &[State]) -> Self {
        let map = |s: StateSet| -> StateSet { s.iter().map(|q| perm[q - 1]).collect() };
        let mut out = TreeAutomaton {
            states: self.states,
            finals: map(self.finals),
            leaf: map(self.leaf),
            app: vec![StateSet::EMPTY; self.states * self.states],
        };
        for (q1, q2, q) in self.app_rules() {
            let idx = out.index(perm[q1 - 1], perm[q2 - 1]);
            out.app[idx].insert(perm[q - 1]);
        }
        out
    }
}

impl fmt::Debug for TreeAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_automaton(self))
    }
}

impl Serialize for TreeAutomaton {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&serialize_automaton(self))
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub const A_P: &str = include_str!("../../fixtures/P.aut");

    pub fn a_p() -> TreeAutomaton {
        parse_automaton(A_P).unwrap()
    }
}
