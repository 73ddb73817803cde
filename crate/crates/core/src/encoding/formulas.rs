//! The constraint sets. States are `1..=N` with `N` the final state.

use std::collections::HashMap;

use super::builder::Builder;
use super::layout::Layout;
use super::Method;
use crate::automata::State;
use crate::terms::{CombinatorRule, Term};

pub(crate) fn emit(rule: &CombinatorRule, layout: &Layout, b: &mut Builder) {
    match layout.method {
        Method::Tdas => {
            sink_final(layout, b);
            reachability_order(layout, b);
            b.unit(layout.redex(layout.n));
            min_left_depth(layout, b);
            redex_states(layout, b);
        }
        Method::TdaBaseline => {
            reachability_order(layout, b);
            nf_product(layout, b);
        }
    }
    evaluation(rule, layout, b);
    closure(rule, layout, b);
}

/// Every pair mentioning `N` goes to `N` and only to `N`.
fn sink_final(l: &Layout, b: &mut Builder) {
    let n = l.n;
    let pairs = (1..=n).map(|q| (n, q)).chain((1..n).map(|q| (q, n)));
    for (q1, q2) in pairs {
        b.unit(l.trans_app(q1, q2, n));
        for q in 1..n {
            b.unit(-l.trans_app(q1, q2, q));
        }
    }
}

/// Each state is produced by `Z` or by a rule over smaller states.
fn reachability_order(l: &Layout, b: &mut Builder) {
    let mut clause = Vec::new();
    for q in 1..=l.n {
        clause.clear();
        clause.push(l.trans_leaf(q));
        for q1 in 1..q {
            for q2 in 1..q {
                clause.push(l.trans_app(q1, q2, q));
            }
        }
        b.clause(&clause);
    }
}

/// `MinLd(q, m) ⇔ ¬leaf(q) ∧ ⋀_{k<m-1} ¬c(q1,q2,q,k) ∧ ⋁ c(q1,q2,q,m-1)`
/// with `c(q1,q2,q,k) = A(q1,q2) -> q ∧ MinLd(q1,k)`.
fn min_left_depth(l: &Layout, b: &mut Builder) {
    let n = l.n;
    let c = |b: &mut Builder, q1: State, q2: State, q: State, k: usize| {
        b.and_shared(&[l.trans_app(q1, q2, q), l.minld(q1, k)])
    };
    for q in 1..n {
        for m in 1..l.m {
            let mut body = vec![-l.trans_leaf(q)];
            for k in 0..m.saturating_sub(1) {
                for q1 in 1..n {
                    for q2 in 1..n {
                        let x = c(b, q1, q2, q, k);
                        body.push(-x);
                    }
                }
            }
            let mut reach = Vec::new();
            for q1 in 1..n {
                for q2 in 1..n {
                    reach.push(c(b, q1, q2, q, m - 1));
                }
            }
            body.push(b.or_shared(&reach));
            b.define_and(l.minld(q, m), &body);
        }
    }
}

/// Sufficient conditions for `L(A, q)` to contain no normal form.
fn redex_states(l: &Layout, b: &mut Builder) {
    let n = l.n;
    for q in 1..=n {
        b.clause(&[-l.redex(q), -l.trans_leaf(q)]);
    }
    for q in 1..=n {
        for q1 in 1..n {
            for q2 in 1..n {
                b.clause(&[
                    -l.redex(q),
                    -l.trans_app(q1, q2, q),
                    l.redex(q1),
                    l.redex(q2),
                    l.minld(q1, l.m - 1),
                ]);
            }
        }
    }
}

/// Over-approximation of the product with the left-depth automaton: no
/// normal form may reach `N`.
fn nf_product(l: &Layout, b: &mut Builder) {
    let (n, m) = (l.n, l.m);
    for q in 1..=n {
        b.clause(&[-l.trans_leaf(q), l.product(q, 0)]);
    }
    for q1 in 1..=n {
        for q2 in 1..=n {
            for q in 1..=n {
                for d1 in 0..m.saturating_sub(1) {
                    for d2 in 0..m {
                        b.clause(&[
                            -l.product(q1, d1),
                            -l.product(q2, d2),
                            -l.trans_app(q1, q2, q),
                            l.product(q, d1 + 1),
                        ]);
                    }
                }
            }
        }
    }
    for d in 0..m {
        b.unit(-l.product(n, d));
    }
}

/// `Eval(t, α, q) ⇔ tα ⇒* q` for every subterm of the rule.
fn evaluation(rule: &CombinatorRule, l: &Layout, b: &mut Builder) {
    let n = l.n;
    let index: HashMap<&Term, usize> = rule.subterms().iter().enumerate().map(|(i, t)| (t, i)).collect();
    let mut alpha = vec![1; l.m];
    let mut disj = Vec::with_capacity(n * n);
    for (t, term) in rule.subterms().iter().enumerate() {
        match term {
            Term::Comb => {}
            Term::Var(x) => {
                for s in 1..=l.radix {
                    alpha[*x] = s;
                    for q in 1..=n {
                        let v = l.eval(t, &alpha, q);
                        b.unit(if q == s { v } else { -v });
                    }
                }
            }
            Term::App(left, right) => {
                let (t1, t2) = (index[&**left], index[&**right]);
                for code in 0..l.alpha_count(t) {
                    l.decode_alpha(t, code, &mut alpha);
                    for q in 1..=n {
                        disj.clear();
                        for q1 in 1..=n {
                            for q2 in 1..=n {
                                let x =
                                    b.and(&[l.eval(t1, &alpha, q1), l.eval(t2, &alpha, q2), l.trans_app(q1, q2, q)]);
                                disj.push(x);
                            }
                        }
                        b.define_or(l.eval(t, &alpha, q), &disj);
                    }
                }
            }
        }
    }
}

/// `Eval(l, α, q) → Eval(r, α, q) ∨ Eval(r, α, N)`.
fn closure(rule: &CombinatorRule, l: &Layout, b: &mut Builder) {
    let subterms = rule.subterms();
    let lhs = subterms.iter().position(|t| t == rule.lhs()).expect("lhs is a subterm");
    let rhs = subterms.iter().position(|t| t == rule.rhs()).expect("rhs is a subterm");
    let mut alpha = vec![1; l.m];
    for code in 0..l.alpha_count(lhs) {
        l.decode_alpha(lhs, code, &mut alpha);
        for q in 1..=l.n {
            let mut clause = vec![-l.eval(lhs, &alpha, q), l.eval(rhs, &alpha, q)];
            if q != l.n {
                clause.push(l.eval(rhs, &alpha, l.n));
            }
            b.clause(&clause);
        }
    }
}
