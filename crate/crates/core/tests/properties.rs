mod common;

use common::{closure_sampling_cases, fixture, random_term, sink_absorption_cases, Table, FIXTURES};
use nonterm::automata::{minld, tda_to_tdas, verify_tda, verify_tdas, Depth, StateSet, TreeAutomaton};
use nonterm::search::CORPUS;
use nonterm::terms::{
    innermost_successors, is_normal_form, is_redex, parse_rule, parse_term, rewrite_successors, CombinatorRule, Term,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ground_term() -> impl Strategy<Value = Term> {
    let leaf = Just(Term::Comb);
    leaf.prop_recursive(6, 48, 2, |inner| {
        (inner.clone(), inner).prop_map(|(l, r)| Term::app(l, r))
    })
}

fn corpus_rule() -> impl Strategy<Value = CombinatorRule> {
    (0..CORPUS.len()).prop_map(|i| CORPUS[i].parse())
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 400,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn printing_then_parsing_is_identity(rule in corpus_rule(), t in ground_term()) {
        let printed = rule.display_term(&t).to_string();
        let back = parse_term(&printed, &rule).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn innermost_steps_are_steps(rule in corpus_rule(), t in ground_term()) {
        let all = rewrite_successors(&t, &rule);
        let inner = innermost_successors(&t, &rule);
        for s in &inner {
            prop_assert!(all.contains(s));
        }
        prop_assert_eq!(inner.is_empty(), all.is_empty());
        prop_assert_eq!(inner.is_empty(), is_normal_form(&t, &rule));
    }

    #[test]
    fn redex_at_root_is_rewritten_at_root(rule in corpus_rule(), args in prop::collection::vec(ground_term(), 5)) {
        let t = Term::apply_all(Term::Comb, args[..rule.arity()].iter().cloned());
        prop_assert!(is_redex(&t, &rule));
        let contracted = rule.rhs().substitute(&args[..rule.arity()]);
        prop_assert!(rewrite_successors(&t, &rule).contains(&contracted));
    }
}

#[test]
fn rules_print_and_parse_back() {
    for e in CORPUS {
        let rule = e.parse();
        assert_eq!(parse_rule(&rule.to_string()).unwrap(), rule);
    }
}

/// Accepted terms stay accepted in any context whose other subterms have a
/// run.
#[test]
fn sink_absorption() {
    assert_eq!(sink_absorption_cases(1000, 1), Ok(1000));
}

/// Without that proviso absorption can fail: some ground terms have no run.
#[test]
fn contexts_need_runs() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (_, a) = fixture("D2");
    let table = Table::of(&a);
    let orphan = (0..1000)
        .map(|_| {
            let leaves = rng.gen_range(1..10);
            random_term(&mut rng, leaves)
        })
        .find(|t| table.run(t, &[]) == 0);
    assert!(orphan.is_some());
}

/// Innermost successors of accepted terms are accepted.
#[test]
fn closure_sampling() {
    let successors = closure_sampling_cases(1000, 2).unwrap();
    assert!(successors >= 1000);
}

fn random_automaton<R: Rng>(rng: &mut R, n: usize, density: f64) -> TreeAutomaton {
    let mut a = TreeAutomaton::new(n, StateSet::singleton(n)).unwrap();
    for q in 1..=n {
        if rng.gen_bool(density) {
            a.add_leaf(q).unwrap();
        }
        for q1 in 1..=n {
            for q2 in 1..=n {
                if rng.gen_bool(density / 2.0) {
                    a.add_app(q1, q2, q).unwrap();
                }
            }
        }
    }
    a
}

#[test]
fn minld_matches_relaxation() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut automata: Vec<TreeAutomaton> = FIXTURES.iter().map(|n| fixture(n).1).collect();
    for _ in 0..500 {
        let n = rng.gen_range(1..7);
        let density = rng.gen_range(0.05..0.4);
        automata.push(random_automaton(&mut rng, n, density));
    }
    for a in &automata {
        let expected = Table::of(a).minld();
        let got = minld(a);
        for q in 1..=a.state_count() {
            let got = match got[q] {
                Depth::Finite(d) => Some(d),
                Depth::Infinite => None,
            };
            assert_eq!(got, expected[q], "state {q}");
        }
    }
}

/// Random automata for `W x -> x x` that pass the escape-to-final check
/// turn into sink-final automata that are no larger.
#[test]
fn construction_never_grows() {
    let rule = parse_rule("W x -> x x").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut converted = 0;
    for _ in 0..20_000 {
        let n = rng.gen_range(2..5);
        let density = rng.gen_range(0.1..0.5);
        let mut a = random_automaton(&mut rng, n, density);
        if rng.gen_bool(0.5) {
            let finals: Vec<_> = (1..=n).filter(|_| rng.gen_bool(0.4)).collect();
            if let Some(&f) = finals.choose(&mut rng) {
                a.set_finals(StateSet::singleton(f)).unwrap();
            }
        }
        if !verify_tda(&a, &rule).passed() {
            continue;
        }
        let b = tda_to_tdas(&a, &rule).unwrap_or_else(|e| panic!("{e}"));
        assert!(b.state_count() <= a.state_count());
        assert!(verify_tdas(&b, &rule).passed());
        converted += 1;
    }
    println!("{converted} random TDAs converted");
    assert!(converted > 100);
}
