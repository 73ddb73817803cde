//! Turning a TDA into a TDAS.
//!
//! Given a TDA `A0` and a final state `q_F`, let `A'` be `A0` plus the sink
//! rules at `q_F`, and `Q_F` the states whose language is contained in
//! `L(A', q_F)`. The result keeps `(Q0 \ Q_F) ∪ {q_F}`, the rules of `A0`
//! whose inputs avoid `Q_F`, and the sink rules at `q_F`.

use super::analysis::reachable_states;
use super::inclusion::language_inclusion;
use super::verify::{verify_tda, verify_tdas};
use super::{AutomatonError, StateSet, TreeAutomaton};
use crate::terms::CombinatorRule;

/// Largest input (after dropping unreachable states) accepted by
/// [`tda_to_tdas`].
pub const CONSTRUCTION_STATE_LIMIT: usize = 12;

/// Builds a TDAS with at most as many states as `a0`. The lowest-numbered
/// final state becomes `q_F`, which is numbered last in the output. The
/// output is checked with [`verify_tdas`] before it is returned.
pub fn tda_to_tdas(a0: &TreeAutomaton, rule: &CombinatorRule) -> Result<TreeAutomaton, AutomatonError> {
    let reach = reachable_states(a0);
    if reach.intersection(a0.finals()).is_empty() {
        return Err(AutomatonError::InvalidInput("no final state is reachable".into()));
    }
    let (a0, _) = a0.restrict(reach, a0.finals())?;
    if a0.state_count() > CONSTRUCTION_STATE_LIMIT {
        return Err(AutomatonError::SizeLimit(format!(
            "{} reachable states, at most {CONSTRUCTION_STATE_LIMIT} supported",
            a0.state_count()
        )));
    }
    let pre = verify_tda(&a0, rule);
    if !pre.passed() {
        return Err(AutomatonError::InvalidInput(format!("input is not a TDA:\n{pre}")));
    }
    let qf = a0.finals().iter().next().expect("non-empty final set");
    let mut with_sink = a0.clone();
    with_sink.add_sink_rules(qf)?;
    let mut absorbed = StateSet::EMPTY;
    for q in a0.states() {
        if language_inclusion(&a0, q, &with_sink, qf)? {
            absorbed.insert(q);
        }
    }
    let rest: StateSet = a0.states().filter(|&q| !absorbed.contains(q)).collect();
    let n = rest.len() + 1;
    // renumber: surviving states in increasing order, then q_F
    let mut map = vec![0; a0.state_count() + 1];
    for (i, q) in rest.iter().enumerate() {
        map[q] = i + 1;
    }
    map[qf] = n;
    let keep = rest.union(StateSet::singleton(qf));
    let mut out = TreeAutomaton::new(n, StateSet::singleton(n))?;
    for q in a0.leaf_targets().iter().filter(|&q| keep.contains(q)) {
        out.add_leaf(map[q])?;
    }
    for (q1, q2, q) in a0.app_rules() {
        if rest.contains(q1) && rest.contains(q2) && keep.contains(q) {
            out.add_app(map[q1], map[q2], map[q])?;
        }
    }
    out.add_sink_rules(n)?;
    let post = verify_tdas(&out, rule);
    if !post.passed() {
        return Err(AutomatonError::InvalidInput(format!(
            "construction did not yield a TDAS:\n{post}"
        )));
    }
    Ok(out)
}
