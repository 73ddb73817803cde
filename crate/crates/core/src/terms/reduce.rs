use std::sync::Arc;

use super::{CombinatorRule, Term};

/// Number of applications on the left spine: `ldepth(Z) = 0`,
/// `ldepth(A(t1, t2)) = 1 + ldepth(t1)`. Variables count as depth 0.
pub fn ldepth(t: &Term) -> usize {
    let mut depth = 0;
    let mut cur = t;
    while let Term::App(l, _) = cur {
        depth += 1;
        cur = l;
    }
    depth
}

/// A ground term is a redex of the rule iff its left depth equals the arity.
pub fn is_redex(t: &Term, rule: &CombinatorRule) -> bool {
    ldepth(t) == rule.arity()
}

pub fn is_normal_form(t: &Term, rule: &CombinatorRule) -> bool {
    match t {
        Term::App(l, r) => !is_redex(t, rule) && is_normal_form(l, rule) && is_normal_form(r, rule),
        _ => true,
    }
}

/// Right children along the left spine, outermost-last: for `Z a1 .. an`
/// this is `[a1, .., an]`.
pub fn spine_arguments(t: &Term) -> Vec<Term> {
    let mut args = Vec::new();
    let mut cur = t;
    while let Term::App(l, r) = cur {
        args.push((**r).clone());
        cur = l;
    }
    args.reverse();
    args
}

/// Contracts a redex at the root. Returns `None` if `t` is not a redex.
pub fn contract(t: &Term, rule: &CombinatorRule) -> Option<Term> {
    if !is_redex(t, rule) {
        return None;
    }
    Some(rule.rhs().substitute(&spine_arguments(t)))
}

/// All one-step innermost reducts in pre-order of the contracted position.
/// Empty iff `t` is a normal form.
pub fn innermost_successors(t: &Term, rule: &CombinatorRule) -> Vec<Term> {
    let mut out = Vec::new();
    successors_into(t, rule, true, &mut out);
    out
}

/// All one-step reducts without the innermost restriction, in pre-order.
pub fn rewrite_successors(t: &Term, rule: &CombinatorRule) -> Vec<Term> {
    let mut out = Vec::new();
    successors_into(t, rule, false, &mut out);
    out
}

/// Pushes successors of `t` and returns whether `t` is a normal form.
fn successors_into(t: &Term, rule: &CombinatorRule, innermost: bool, out: &mut Vec<Term>) -> bool {
    let Term::App(l, r) = t else {
        return true;
    };
    let redex = is_redex(t, rule);
    let mut left = Vec::new();
    let mut right = Vec::new();
    let nf_l = successors_into(l, rule, innermost, &mut left);
    let nf_r = successors_into(r, rule, innermost, &mut right);
    // Spine nodes below a redex have smaller left depth, so the proper
    // subterms are normal iff both children are.
    if redex && (!innermost || (nf_l && nf_r)) {
        out.push(rule.rhs().substitute(&spine_arguments(t)));
    }
    out.extend(left.into_iter().map(|s| Term::App(Arc::new(s), r.clone())));
    out.extend(right.into_iter().map(|s| Term::App(l.clone(), Arc::new(s))));
    nf_l && nf_r && !redex
}
