use rand::seq::SliceRandom;
use rand::Rng;

use super::{State, StateSet, TreeAutomaton};
use crate::terms::Term;

/// Draws a term of `L(A, q)` with depth at most `max_depth` by top-down
/// expansion, choosing uniformly among the rules that can still finish in
/// the remaining depth. `None` if no such term exists.
pub fn random_accepted_term<R: Rng + ?Sized>(
    rng: &mut R,
    a: &TreeAutomaton,
    q: State,
    max_depth: usize,
) -> Option<Term> {
    // within[d]: states with a term of depth <= d
    let mut within = vec![a.leaf_targets()];
    for d in 1..=max_depth {
        let prev = within[d - 1];
        let next = prev.union(a.app_targets_sets(prev, prev));
        within.push(next);
    }
    if !within[max_depth].contains(q) {
        return None;
    }
    Some(expand(rng, a, &within, q, max_depth))
}

fn expand<R: Rng + ?Sized>(rng: &mut R, a: &TreeAutomaton, within: &[StateSet], q: State, depth: usize) -> Term {
    let mut options: Vec<Option<(State, State)>> = Vec::new();
    if a.leaf_targets().contains(q) {
        options.push(None);
    }
    if depth > 0 {
        let below = within[depth - 1];
        for q1 in below.iter() {
            for q2 in below.iter() {
                if a.has_app(q1, q2, q) {
                    options.push(Some((q1, q2)));
                }
            }
        }
    }
    match *options.choose(rng).expect("state is productive within depth") {
        None => Term::Comb,
        Some((q1, q2)) => Term::app(
            expand(rng, a, within, q1, depth - 1),
            expand(rng, a, within, q2, depth - 1),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::fixtures::a_p;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_are_accepted() {
        let a = a_p();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let t = random_accepted_term(&mut rng, &a, 4, 6).unwrap();
            assert!(a.run(&t).contains(4));
            assert!(t.depth() <= 6);
        }
    }

    #[test]
    fn depth_too_small() {
        let a = a_p();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        // the smallest term at 4 has depth 3
        assert!(random_accepted_term(&mut rng, &a, 4, 2).is_none());
        assert!(random_accepted_term(&mut rng, &a, 1, 0).is_some());
    }
}
