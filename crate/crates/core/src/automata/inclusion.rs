//! `L(A, q) ⊆ L(B, p)` by subset construction on `B`.

use std::collections::HashMap;

use super::{AutomatonError, State, StateSet, TreeAutomaton};

/// Maximum number of subset states built while determinizing.
pub const SUBSET_STATE_LIMIT: usize = 1 << 12;

/// Reachable part of the subset automaton of `b`: `sets[i]` is the set of
/// `b`-states reached by some term, `delta[(i, j)]` the subset reached by
/// applying a term of `sets[i]` to one of `sets[j]`.
struct Determinized {
    sets: Vec<StateSet>,
    delta: HashMap<(usize, usize), usize>,
    leaf: usize,
}

fn determinize(b: &TreeAutomaton) -> Result<Determinized, AutomatonError> {
    let mut sets = vec![b.leaf_targets()];
    let mut index: HashMap<StateSet, usize> = HashMap::from([(b.leaf_targets(), 0)]);
    let mut delta = HashMap::new();
    let mut done = 0;
    // each new subset is combined with every subset found so far, both ways
    while done < sets.len() {
        let i = done;
        done += 1;
        for j in 0..done {
            for (x, y) in [(i, j), (j, i)] {
                if delta.contains_key(&(x, y)) {
                    continue;
                }
                let target = b.app_targets_sets(sets[x], sets[y]);
                let k = match index.get(&target) {
                    Some(&k) => k,
                    None => {
                        if sets.len() >= SUBSET_STATE_LIMIT {
                            return Err(AutomatonError::SizeLimit(format!(
                                "subset construction exceeds {SUBSET_STATE_LIMIT} states"
                            )));
                        }
                        sets.push(target);
                        index.insert(target, sets.len() - 1);
                        sets.len() - 1
                    }
                };
                delta.insert((x, y), k);
            }
        }
    }
    Ok(Determinized { sets, delta, leaf: 0 })
}

/// Decides `L(A, q) ⊆ L(B, p)`: no reachable pair `(q, S)` of the product of
/// `A` with the determinized `B` has `p ∉ S`.
pub fn language_inclusion(a: &TreeAutomaton, q: State, b: &TreeAutomaton, p: State) -> Result<bool, AutomatonError> {
    for (state, states) in [(q, a.state_count()), (p, b.state_count())] {
        if state == 0 || state > states {
            return Err(AutomatonError::StateOutOfRange { state, states });
        }
    }
    let det = determinize(b)?;
    let mut pairs: Vec<(State, usize)> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for s in a.leaf_targets().iter() {
        if seen.insert((s, det.leaf)) {
            pairs.push((s, det.leaf));
        }
    }
    let mut done = 0;
    while done < pairs.len() {
        let i = done;
        done += 1;
        for j in 0..done {
            for (x, y) in [(pairs[i], pairs[j]), (pairs[j], pairs[i])] {
                let d = det.delta[&(x.1, y.1)];
                for s in a.app_targets(x.0, y.0).iter() {
                    if seen.insert((s, d)) {
                        pairs.push((s, d));
                    }
                }
            }
        }
    }
    Ok(pairs.iter().all(|&(s, d)| s != q || det.sets[d].contains(p)))
}
