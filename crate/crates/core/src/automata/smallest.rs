//! Smallest trees per state of a bottom-up system.
//!
//! Trees are ranked by `(leaf count, printed form)`. Both components are
//! monotone under `A(t1, t2)`, so a Knuth-style generalization of Dijkstra
//! finalizes states in increasing key order and yields, per state, the
//! unique minimal tree.

use super::{State, TreeAutomaton};
use crate::terms::Term;

pub(crate) struct TreeGrammar {
    pub(crate) states: usize,
    pub(crate) leaves: Vec<usize>,
    pub(crate) rules: Vec<(usize, usize, usize)>,
}

impl TreeGrammar {
    pub(crate) fn new(states: usize) -> Self {
        TreeGrammar {
            states,
            leaves: Vec::new(),
            rules: Vec::new(),
        }
    }

    pub(crate) fn from_automaton(a: &TreeAutomaton) -> Self {
        let mut g = TreeGrammar::new(a.state_count());
        g.leaves = a.leaf_targets().iter().map(|q| q - 1).collect();
        g.rules = a.app_rules().map(|(q1, q2, q)| (q1 - 1, q2 - 1, q - 1)).collect();
        g
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Found {
    pub(crate) leaves: usize,
    pub(crate) printed: String,
    pub(crate) term: Term,
}

impl Found {
    pub(crate) fn key(&self) -> (usize, &str) {
        (self.leaves, &self.printed)
    }

    fn leaf() -> Self {
        Found {
            leaves: 1,
            printed: "Z".into(),
            term: Term::Comb,
        }
    }

    fn app(l: &Found, r: &Found) -> Self {
        let printed = if r.leaves == 1 {
            format!("{} {}", l.printed, r.printed)
        } else {
            format!("{} ({})", l.printed, r.printed)
        };
        Found {
            leaves: l.leaves + r.leaves,
            printed,
            term: Term::app(l.term.clone(), r.term.clone()),
        }
    }
}

pub(crate) fn smallest_trees(g: &TreeGrammar) -> Vec<Option<Found>> {
    let mut best: Vec<Option<Found>> = vec![None; g.states];
    let mut done = vec![false; g.states];
    for &q in &g.leaves {
        best[q] = Some(Found::leaf());
    }
    // rules grouped by child so finalizing a state only revisits its rules
    let mut by_child: Vec<Vec<usize>> = vec![Vec::new(); g.states];
    for (i, &(l, r, _)) in g.rules.iter().enumerate() {
        by_child[l].push(i);
        if r != l {
            by_child[r].push(i);
        }
    }
    loop {
        let next = (0..g.states)
            .filter(|&q| !done[q])
            .filter_map(|q| best[q].as_ref().map(|f| (q, f)))
            .min_by(|(_, x), (_, y)| x.key().cmp(&y.key()))
            .map(|(q, _)| q);
        let Some(q) = next else { break };
        done[q] = true;
        for &i in &by_child[q] {
            let (l, r, target) = g.rules[i];
            if done[target] || !done[l] || !done[r] {
                continue;
            }
            let cand = Found::app(best[l].as_ref().unwrap(), best[r].as_ref().unwrap());
            let better = match &best[target] {
                Some(cur) => cand.key() < cur.key(),
                None => true,
            };
            if better {
                best[target] = Some(cand);
            }
        }
    }
    best
}

/// A smallest term of `L(A, q)`, ties broken by printed form.
pub fn smallest_term_at(a: &TreeAutomaton, q: State) -> Option<Term> {
    smallest_trees(&TreeGrammar::from_automaton(a))
        .swap_remove(q - 1)
        .map(|f| f.term)
}

/// A term of minimum leaf count in `L(A)`; among those, the one whose
/// printed form is lexicographically least. `None` iff `L(A)` is empty.
pub fn smallest_accepted_term(a: &TreeAutomaton) -> Option<Term> {
    let best = smallest_trees(&TreeGrammar::from_automaton(a));
    a.finals()
        .iter()
        .filter_map(|q| best[q - 1].as_ref())
        .min_by(|x, y| x.key().cmp(&y.key()))
        .map(|f| f.term.clone())
}
